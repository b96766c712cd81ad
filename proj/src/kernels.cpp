#include "nhqw/kernels.hpp"

#include <algorithm>
#include <cassert>

namespace nhqw::kernels {

SparseCsr SparseCsr::from_triplets(int rows, int cols, std::vector<Triplet> entries) {
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseCsr m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(rows + 1, 0);
    for (const auto& t : entries) m.row_ptr[t.row + 1]++;
    for (int r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    m.col_idx.resize(entries.size());
    m.val.resize(entries.size());
    std::vector<int> cursor(m.row_ptr.begin(), m.row_ptr.end() - 1);
    for (const auto& t : entries) {
        const int at = cursor[t.row]++;
        m.col_idx[at] = t.col;
        m.val[at] = t.value;
    }
    // collapse duplicate (row, col) pairs
    SparseCsr out;
    out.rows = rows;
    out.cols = cols;
    out.row_ptr.assign(rows + 1, 0);
    for (int r = 0; r < rows; ++r) {
        int i = m.row_ptr[r];
        while (i < m.row_ptr[r + 1]) {
            int j = i + 1;
            Complex v = m.val[i];
            while (j < m.row_ptr[r + 1] && m.col_idx[j] == m.col_idx[i]) v += m.val[j++];
            out.col_idx.push_back(m.col_idx[i]);
            out.val.push_back(v);
            out.row_ptr[r + 1]++;
            i = j;
        }
    }
    for (int r = 0; r < rows; ++r) out.row_ptr[r + 1] += out.row_ptr[r];
    return out;
}

SparseCsr SparseCsr::transposed() const {
    std::vector<Triplet> tr;
    tr.reserve(col_idx.size());
    for (int r = 0; r < rows; ++r)
        for (int i = row_ptr[r]; i < row_ptr[r + 1]; ++i)
            tr.push_back({col_idx[i], r, val[i]});
    return from_triplets(cols, rows, std::move(tr));
}

Matrix SparseCsr::to_dense() const {
    Matrix d = Matrix::Zero(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int i = row_ptr[r]; i < row_ptr[r + 1]; ++i) d(r, col_idx[i]) += val[i];
    return d;
}

namespace {

inline void spmm_left_column(const SparseCsr& a, const Matrix& b, Matrix& c, int j) {
    const Complex* bj = b.col(j).data();
    Complex* cj = c.col(j).data();
    for (int r = 0; r < a.rows; ++r) {
        Complex acc{0.0, 0.0};
        for (int i = a.row_ptr[r]; i < a.row_ptr[r + 1]; ++i) acc += a.val[i] * bj[a.col_idx[i]];
        cj[r] = acc;
    }
}

inline void spmm_right_column(const Matrix& b, const SparseCsr& a_t, Matrix& c, int j) {
    Complex* cj = c.col(j).data();
    for (int r = 0; r < b.rows(); ++r) cj[r] = Complex{0.0, 0.0};
    // column j of A = row j of a_t; C(:,j) = sum_k A(k,j) * B(:,k)
    for (int i = a_t.row_ptr[j]; i < a_t.row_ptr[j + 1]; ++i) {
        const Complex v = a_t.val[i];
        const Complex* bk = b.col(a_t.col_idx[i]).data();
        for (int r = 0; r < b.rows(); ++r) cj[r] += v * bk[r];
    }
}

}  // namespace

void spmm_left(const SparseCsr& a, const Matrix& b, Matrix& c) {
    assert(a.cols == b.rows());
    c.resize(a.rows, b.cols());
    const int n = static_cast<int>(b.cols());
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) spmm_left_column(a, b, c, j);
}

void spmm_left_serial(const SparseCsr& a, const Matrix& b, Matrix& c) {
    assert(a.cols == b.rows());
    c.resize(a.rows, b.cols());
    for (int j = 0; j < b.cols(); ++j) spmm_left_column(a, b, c, j);
}

void spmm_right(const Matrix& b, const SparseCsr& a_t, Matrix& c) {
    assert(b.cols() == a_t.cols);  // a_t is cols x rows of A
    c.resize(b.rows(), a_t.rows);
    const int n = a_t.rows;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) spmm_right_column(b, a_t, c, j);
}

void spmm_right_serial(const Matrix& b, const SparseCsr& a_t, Matrix& c) {
    assert(b.cols() == a_t.cols);
    c.resize(b.rows(), a_t.rows);
    for (int j = 0; j < a_t.rows; ++j) spmm_right_column(b, a_t, c, j);
}

void spmv(const SparseCsr& a, const Vector& x, Vector& y) {
    assert(a.cols == x.size());
    y.resize(a.rows);
    for (int r = 0; r < a.rows; ++r) {
        Complex acc{0.0, 0.0};
        for (int i = a.row_ptr[r]; i < a.row_ptr[r + 1]; ++i) acc += a.val[i] * x[a.col_idx[i]];
        y[r] = acc;
    }
}

void rk4_combine(const Matrix& x, const Matrix& k1, const Matrix& k2, const Matrix& k3,
                 const Matrix& k4, double h, Matrix& out) {
    out.resize(x.rows(), x.cols());
    const auto n = static_cast<long>(x.size());
    const double c = h / 6.0;
    const Complex* px = x.data();
    const Complex* p1 = k1.data();
    const Complex* p2 = k2.data();
    const Complex* p3 = k3.data();
    const Complex* p4 = k4.data();
    Complex* po = out.data();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        po[i] = px[i] + c * (p1[i] + 2.0 * p2[i] + 2.0 * p3[i] + p4[i]);
}

void rk4_combine_serial(const Matrix& x, const Matrix& k1, const Matrix& k2, const Matrix& k3,
                        const Matrix& k4, double h, Matrix& out) {
    out.resize(x.rows(), x.cols());
    const auto n = static_cast<long>(x.size());
    const double c = h / 6.0;
    for (long i = 0; i < n; ++i)
        out.data()[i] = x.data()[i] + c * (k1.data()[i] + 2.0 * k2.data()[i] +
                                           2.0 * k3.data()[i] + k4.data()[i]);
}

}  // namespace nhqw::kernels
