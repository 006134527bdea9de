#pragma once

// Dense complex linear algebra, density matrices and Kraus-form channels.
//
// vec() uses row-major order: vec(rho)[i*S + j] = rho(i, j). With that order
// the transfer matrix of rho -> E rho E^dag is E (x) conj(E).

#include "coinlab/complex.hpp"
#include "coinlab/errors.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace coinlab {

template <class F>
using Vector = std::vector<Complex<F>>;

template <class F>
class Matrix {
public:
    using Scalar = Complex<F>;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Scalar(1);
        return m;
    }
    /// |i><j| in dimension n.
    static Matrix unit(std::size_t n, std::size_t i, std::size_t j) {
        Matrix m(n, n);
        m(i, j) = Scalar(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const Scalar> data() const { return data_; }
    std::span<Scalar> data() { return data_; }

    Matrix adjoint() const {
        Matrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = conj((*this)(i, j));
        return r;
    }
    Matrix transpose() const {
        Matrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    bool is_zero() const {
        for (const auto& x : data_)
            if (!x.is_zero()) return false;
        return true;
    }

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(const Scalar& s) {
        for (auto& x : data_) x *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, const Scalar& s) { return a *= s; }
    friend Matrix operator*(const Scalar& s, Matrix a) { return a *= s; }
    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Scalar> data_;
};

template <class F>
Matrix<F> operator*(const Matrix<F>& a, const Matrix<F>& b);
template <class F>
Vector<F> operator*(const Matrix<F>& a, const Vector<F>& v);
/// Row vector times matrix: (v^T A)^T.
template <class F>
Vector<F> left_multiply(const Vector<F>& v, const Matrix<F>& a);

template <class F>
Matrix<F> kron(const Matrix<F>& a, const Matrix<F>& b);

/// max_ij |a_ij|^2
template <class F>
F max_abs2(const Matrix<F>& a);
template <class F>
F frobenius2(const Matrix<F>& a);
template <class F>
F max_abs2(const Vector<F>& v);

template <class F>
Matrix<F> convert_matrix(const Matrix<Rational>& a);
template <class F>
Vector<F> convert_vector(const Vector<Rational>& v);

template <class F>
Complex<F> dot(const Vector<F>& a, const Vector<F>& b);  // sum conj(a_i) b_i

/// Solves A X = B by LU with partial pivoting. Throws PrecisionError when a
/// pivot vanishes (exactly, or below 2^-bits relative in float mode).
template <class F>
Matrix<F> solve(const Matrix<F>& a, const Matrix<F>& b);
template <class F>
Matrix<F> inverse(const Matrix<F>& a);

/// Basis of {x : A x = 0} from the reduced row echelon form. In float mode
/// pivots with |.| <= tol are treated as zero.
template <class F>
std::vector<Vector<F>> nullspace(const Matrix<F>& a, const F& tol);

/// Hermitian PSD factorization A = sum_k d_k l_k l_k^dag with d_k > 0.
/// Throws InvariantViolation if A is not PSD within tol.
template <class F>
struct LdlTerms {
    std::vector<F> weights;
    std::vector<Vector<F>> vectors;
};
template <class F>
LdlTerms<F> ldl_psd(const Matrix<F>& a, const F& tol);

// ---------------------------------------------------------------------------
// Density matrices

template <class F>
class DensityMatrix {
public:
    /// Validates: Hermitian, trace 1 and PSD within tol.
    explicit DensityMatrix(Matrix<F> m, const F& tol = default_tolerance<F>());

    static DensityMatrix basis_state(std::size_t dim, std::size_t i) {
        return DensityMatrix(Matrix<F>::unit(dim, i, i));
    }
    /// Skips validation; for trusted internal results.
    static DensityMatrix unchecked(Matrix<F> m) {
        DensityMatrix d;
        d.m_ = std::move(m);
        return d;
    }

    std::size_t dim() const { return m_.rows(); }
    const Matrix<F>& matrix() const { return m_; }
    const Complex<F>& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

    friend bool operator==(const DensityMatrix& a, const DensityMatrix& b) { return a.m_ == b.m_; }

private:
    DensityMatrix() = default;
    Matrix<F> m_;
};

/// Reason a matrix fails to be a density matrix, or empty when it is one.
template <class F>
std::string density_defect(const Matrix<F>& m, const F& tol);

template <class F>
Vector<F> vectorize(const DensityMatrix<F>& rho);
template <class F>
Vector<F> vectorize(const Matrix<F>& m);
template <class F>
Matrix<F> devectorize(const Vector<F>& v, std::size_t dim);

// ---------------------------------------------------------------------------
// Channels

/// One Kraus operator sqrt(weight) * op. Weights let exact mode represent
/// families such as sqrt(p) E without irrational entries.
template <class F>
struct KrausTerm {
    F weight;
    Matrix<F> op;
};

template <class F>
class Superoperator {
public:
    Superoperator() = default;
    Superoperator(std::size_t dim, std::vector<KrausTerm<F>> terms);

    /// Every term carries weight 1.
    static Superoperator from_kraus(std::vector<Matrix<F>> ops);
    static Superoperator identity(std::size_t dim);

    std::size_t dim() const { return dim_; }
    const std::vector<KrausTerm<F>>& terms() const { return terms_; }

private:
    std::size_t dim_ = 0;
    std::vector<KrausTerm<F>> terms_;
};

template <class F>
struct KrausReport {
    bool pass = false;
    F residual2;      // ||sum_j w_j E_j^dag E_j - I||_F^2
    double residual;  // its square root, for display
};

template <class F>
KrausReport<F> validate_kraus(const Superoperator<F>& e, const F& tol = default_tolerance<F>());

/// S^2 x S^2 matrix with mat(E) vec(rho) = vec(E(rho)).
template <class F>
Matrix<F> superop_matrix(const Superoperator<F>& e);

/// E(rho) = sum_j w_j E_j rho E_j^dag. Throws InvalidInput for an invalid family.
template <class F>
DensityMatrix<F> apply(const Superoperator<F>& e, const DensityMatrix<F>& rho);
/// Same map on an arbitrary matrix, without validation.
template <class F>
Matrix<F> apply_raw(const Superoperator<F>& e, const Matrix<F>& m);

/// second o first; products that vanish are dropped.
template <class F>
Superoperator<F> compose(const Superoperator<F>& second, const Superoperator<F>& first);

/// p * heads + (1-p) * tails, as the family {sqrt(p) heads, sqrt(1-p) tails}.
template <class F>
Superoperator<F> mix(const F& p, const Superoperator<F>& heads, const Superoperator<F>& tails);

template <class F>
Superoperator<F> convert_superop(const Superoperator<Rational>& e);

/// Classical channel from a column-stochastic matrix: column i is the
/// distribution of the next basis state given current state i.
template <class F>
Superoperator<F> classical_channel(const std::vector<std::vector<F>>& stochastic);

// ---------------------------------------------------------------------------
// Sparse transfer matrices

template <class F>
struct SparseEntry {
    std::size_t row;
    std::size_t col;
    Complex<F> value;
};

/// Square sparse matrix as a list of nonzeros sorted by (row, col).
template <class F>
struct SparseMatrix {
    std::size_t n = 0;
    std::vector<SparseEntry<F>> entries;

    Vector<F> multiply(const Vector<F>& v) const;       // A v
    Vector<F> left_multiply(const Vector<F>& v) const;  // (v^T A)^T
    Matrix<F> dense() const;
};

/// mat(E) built from the Kraus nonzeros directly.
template <class F>
SparseMatrix<F> sparse_superop(const Superoperator<F>& e);

/// p * heads + (1 - p) * tails, entrywise.
template <class F>
SparseMatrix<F> mix_sparse(const F& p, const SparseMatrix<F>& heads, const SparseMatrix<F>& tails);

/// Copy of a Real matrix whose entries carry the current working precision.
Matrix<Real> promote(const Matrix<Real>& a);
Vector<Real> promote(const Vector<Real>& v);

}  // namespace coinlab
