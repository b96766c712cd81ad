#include "nhqw/fock.hpp"

#include <cmath>
#include <numbers>

#include "nhqw/kernels.hpp"

namespace nhqw::fock {

int Basis::index_two(int i, int j) const {
    if (i > j) std::swap(i, j);
    // pairs ordered (0,0),(0,1)...(0,M-1),(1,1),...: offset of row i plus j-i
    const int row_offset = i * sites - i * (i - 1) / 2;
    return 1 + sites + row_offset + (j - i);
}

std::array<int, 2> Basis::occupied_pair(int index) const {
    int rem = index - 1 - sites;
    for (int i = 0; i < sites; ++i) {
        const int row = sites - i;
        if (rem < row) return {i, i + rem};
        rem -= row;
    }
    throw DomainError("not a two-photon basis index");
}

Basis make_basis(int sites) {
    if (sites < 1) throw DomainError("need at least one site");
    Basis b;
    b.sites = sites;
    return b;
}

Matrix annihilation(const Basis& basis, int j) {
    if (j < 0 || j >= basis.sites) throw DomainError("site out of range");
    const int d = basis.dim();
    Matrix a = Matrix::Zero(d, d);
    // one-photon sector: a_j |1_j> = |0>
    a(basis.index_vac(), basis.index_one(j)) = 1.0;
    // two-photon sector: a_j |n_i n_k> with occupation rules
    for (int i = 0; i < basis.sites; ++i) {
        for (int k = i; k < basis.sites; ++k) {
            const int col = basis.index_two(i, k);
            if (i == k) {
                if (i == j) a(basis.index_one(j), col) = std::numbers::sqrt2;
            } else {
                if (i == j) a(basis.index_one(k), col) = 1.0;
                if (k == j) a(basis.index_one(i), col) = 1.0;
            }
        }
    }
    return a;
}

Matrix lift_single_particle(const Basis& basis, const Matrix& h) {
    if (h.rows() != basis.sites || h.cols() != basis.sites)
        throw DomainError("single-particle matrix size must match the site count");
    const int d = basis.dim();
    Matrix out = Matrix::Zero(d, d);
    for (int n = 0; n < basis.sites; ++n) {
        const Matrix an = annihilation(basis, n);
        for (int m = 0; m < basis.sites; ++m) {
            if (h(n, m) == Complex{0.0, 0.0}) continue;
            const Matrix am = annihilation(basis, m);
            out += h(n, m) * (an.adjoint() * am);
        }
    }
    return out;
}

Vector evolve(const Matrix& hamiltonian, Vector psi, double t, int steps) {
    Matrix x = psi;
    kernels::rk4_integrate(x, 0.0, t, steps, [&](double, const Matrix& v, Matrix& out) {
        out = -kImagUnit * (hamiltonian * v);
    });
    return x.col(0);
}

}  // namespace nhqw::fock
