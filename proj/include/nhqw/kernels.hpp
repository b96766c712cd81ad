#pragma once

// Data-parallel linear-algebra kernels used by the propagation engines.
// Every OpenMP kernel has a serial twin; the twins are the reference
// implementations the tests and the benchmark compare against. Each output
// element is produced by exactly one thread with a fixed accumulation order,
// so parallel and serial results are bitwise identical.

#include <span>
#include <vector>

#include "nhqw/types.hpp"

namespace nhqw::kernels {

// Complex CSR matrix with a fixed sparsity pattern and mutable values.
struct SparseCsr {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;   // size rows+1
    std::vector<int> col_idx;   // size nnz
    std::vector<Complex> val;   // size nnz

    int nnz() const { return static_cast<int>(col_idx.size()); }

    struct Triplet {
        int row, col;
        Complex value;
    };
    static SparseCsr from_triplets(int rows, int cols, std::vector<Triplet> entries);
    SparseCsr transposed() const;
    Matrix to_dense() const;
};

// C = A * B with A sparse. Parallelized over columns of B.
void spmm_left(const SparseCsr& a, const Matrix& b, Matrix& c);
void spmm_left_serial(const SparseCsr& a, const Matrix& b, Matrix& c);

// C = B * A with A sparse; `a_t` must be the transpose of A (so that rows of
// `a_t` enumerate columns of A). Parallelized over columns of C.
void spmm_right(const Matrix& b, const SparseCsr& a_t, Matrix& c);
void spmm_right_serial(const Matrix& b, const SparseCsr& a_t, Matrix& c);

// y = A * x with A sparse.
void spmv(const SparseCsr& a, const Vector& x, Vector& y);

// out = x + c1*k1 + c2*k2 + c3*k3 + c4*k4, elementwise over equally sized
// matrices. The classical RK4 update.
void rk4_combine(const Matrix& x, const Matrix& k1, const Matrix& k2, const Matrix& k3,
                 const Matrix& k4, double h, Matrix& out);
void rk4_combine_serial(const Matrix& x, const Matrix& k1, const Matrix& k2, const Matrix& k3,
                        const Matrix& k4, double h, Matrix& out);

// Fixed-step classical RK4 for dX/dz = f(z, X) on complex matrices.
// f must write its result into the third argument.
template <class Rhs>
void rk4_integrate(Matrix& x, double z0, double length, int steps, Rhs&& f) {
    const double h = length / steps;
    Matrix k1(x.rows(), x.cols()), k2(x.rows(), x.cols());
    Matrix k3(x.rows(), x.cols()), k4(x.rows(), x.cols());
    Matrix tmp(x.rows(), x.cols()), next(x.rows(), x.cols());
    for (int s = 0; s < steps; ++s) {
        const double z = z0 + s * h;
        f(z, x, k1);
        tmp = x + (h / 2) * k1;
        f(z + h / 2, tmp, k2);
        tmp = x + (h / 2) * k2;
        f(z + h / 2, tmp, k3);
        tmp = x + h * k3;
        f(z + h, tmp, k4);
        rk4_combine(x, k1, k2, k3, k4, h, next);
        x.swap(next);
    }
}

}  // namespace nhqw::kernels
