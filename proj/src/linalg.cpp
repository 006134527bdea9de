#include "coinlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace coinlab {
namespace {

template <class F>
void require_same_shape(const Matrix<F>& a, const Matrix<F>& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidInput(std::string("shape mismatch in ") + op);
}

// Threshold below which a float pivot counts as zero, relative to `scale2`
// (a squared magnitude).
template <class F>
F pivot_floor2(const F& scale2) {
    if constexpr (is_exact_v<F>) {
        (void)scale2;
        return F(0);
    } else {
        Real eps = ldexp(Real(1), -static_cast<int>(precision_bits()));
        return scale2 * eps * eps;
    }
}

}  // namespace

template <class F>
Matrix<F>& Matrix<F>::operator+=(const Matrix& o) {
    require_same_shape(*this, o, "+");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

template <class F>
Matrix<F>& Matrix<F>::operator-=(const Matrix& o) {
    require_same_shape(*this, o, "-");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

template <class F>
Matrix<F> operator*(const Matrix<F>& a, const Matrix<F>& b) {
    if (a.cols() != b.rows()) throw InvalidInput("shape mismatch in matrix product");
    Matrix<F> r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const auto& aik = a(i, k);
            if (aik.is_zero()) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                const auto& bkj = b(k, j);
                if (!bkj.is_zero()) r(i, j) += aik * bkj;
            }
        }
    return r;
}

template <class F>
Vector<F> operator*(const Matrix<F>& a, const Vector<F>& v) {
    if (a.cols() != v.size()) throw InvalidInput("shape mismatch in matrix-vector product");
    Vector<F> r(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const auto& aik = a(i, k);
            if (!aik.is_zero() && !v[k].is_zero()) r[i] += aik * v[k];
        }
    return r;
}

template <class F>
Vector<F> left_multiply(const Vector<F>& v, const Matrix<F>& a) {
    if (a.rows() != v.size()) throw InvalidInput("shape mismatch in vector-matrix product");
    Vector<F> r(a.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        if (v[k].is_zero()) continue;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const auto& akj = a(k, j);
            if (!akj.is_zero()) r[j] += v[k] * akj;
        }
    }
    return r;
}

template <class F>
Matrix<F> kron(const Matrix<F>& a, const Matrix<F>& b) {
    Matrix<F> r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (a(i, j).is_zero()) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
        }
    return r;
}

template <class F>
F max_abs2(const Matrix<F>& a) {
    F best(0);
    for (const auto& x : a.data()) {
        F n = norm2(x);
        if (n > best) best = n;
    }
    return best;
}

template <class F>
F max_abs2(const Vector<F>& v) {
    F best(0);
    for (const auto& x : v) {
        F n = norm2(x);
        if (n > best) best = n;
    }
    return best;
}

template <class F>
F frobenius2(const Matrix<F>& a) {
    F s(0);
    for (const auto& x : a.data()) s += norm2(x);
    return s;
}

template <class F>
Matrix<F> convert_matrix(const Matrix<Rational>& a) {
    Matrix<F> r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = convert_complex<F>(a(i, j));
    return r;
}

template <class F>
Vector<F> convert_vector(const Vector<Rational>& v) {
    Vector<F> r;
    r.reserve(v.size());
    for (const auto& x : v) r.push_back(convert_complex<F>(x));
    return r;
}

template <class F>
Complex<F> dot(const Vector<F>& a, const Vector<F>& b) {
    if (a.size() != b.size()) throw InvalidInput("length mismatch in dot product");
    Complex<F> s;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!a[i].is_zero() && !b[i].is_zero()) s += conj(a[i]) * b[i];
    return s;
}

template <class F>
Matrix<F> solve(const Matrix<F>& a_in, const Matrix<F>& b_in) {
    if (!a_in.square() || a_in.rows() != b_in.rows()) throw InvalidInput("shape mismatch in solve");
    const std::size_t n = a_in.rows();
    const std::size_t m = b_in.cols();
    Matrix<F> a = a_in;
    Matrix<F> b = b_in;
    const F floor2 = pivot_floor2<F>(max_abs2(a_in));
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        F best = norm2(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if constexpr (is_exact_v<F>) {
                if (!best.is_zero()) break;
            }
            F cand = norm2(a(i, k));
            if (cand > best) {
                best = cand;
                piv = i;
            }
        }
        if (best == 0 || best <= floor2)
            throw PrecisionError("singular linear system (pivot " + std::to_string(k) + ")", 1.0);
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            for (std::size_t j = 0; j < m; ++j) std::swap(b(k, j), b(piv, j));
        }
        const Complex<F> inv = Complex<F>(1) / a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k).is_zero()) continue;
            Complex<F> f = a(i, k) * inv;
            a(i, k) = Complex<F>();
            for (std::size_t j = k + 1; j < n; ++j)
                if (!a(k, j).is_zero()) a(i, j) -= f * a(k, j);
            for (std::size_t j = 0; j < m; ++j)
                if (!b(k, j).is_zero()) b(i, j) -= f * b(k, j);
        }
    }
    Matrix<F> x(n, m);
    for (std::size_t jj = 0; jj < m; ++jj) {
        for (std::size_t ii = n; ii-- > 0;) {
            Complex<F> s = b(ii, jj);
            for (std::size_t k = ii + 1; k < n; ++k)
                if (!a(ii, k).is_zero() && !x(k, jj).is_zero()) s -= a(ii, k) * x(k, jj);
            x(ii, jj) = s / a(ii, ii);
        }
    }
    return x;
}

template <class F>
Matrix<F> inverse(const Matrix<F>& a) {
    return solve(a, Matrix<F>::identity(a.rows()));
}

template <class F>
std::vector<Vector<F>> nullspace(const Matrix<F>& a_in, const F& tol) {
    Matrix<F> a = a_in;
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    const F tol2 = tol * tol;
    std::vector<std::size_t> pivot_cols;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        F best = norm2(a(r, c));
        for (std::size_t i = r + 1; i < rows; ++i) {
            F cand = norm2(a(i, c));
            if (cand > best) {
                best = cand;
                piv = i;
            }
        }
        if (best == 0 || best <= tol2) {
            if constexpr (!is_exact_v<F>) {
                for (std::size_t i = r; i < rows; ++i) a(i, c) = Complex<F>();
            }
            continue;
        }
        if (piv != r)
            for (std::size_t j = 0; j < cols; ++j) std::swap(a(r, j), a(piv, j));
        const Complex<F> inv = Complex<F>(1) / a(r, c);
        for (std::size_t j = c; j < cols; ++j) a(r, j) *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a(i, c).is_zero()) continue;
            Complex<F> f = a(i, c);
            for (std::size_t j = c; j < cols; ++j)
                if (!a(r, j).is_zero()) a(i, j) -= f * a(r, j);
        }
        pivot_cols.push_back(c);
        ++r;
    }
    std::vector<bool> is_pivot(cols, false);
    for (auto c : pivot_cols) is_pivot[c] = true;
    std::vector<Vector<F>> basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        Vector<F> v(cols);
        v[free] = Complex<F>(1);
        for (std::size_t k = 0; k < pivot_cols.size(); ++k) v[pivot_cols[k]] = -a(k, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

template <class F>
LdlTerms<F> ldl_psd(const Matrix<F>& a_in, const F& tol) {
    if (!a_in.square()) throw InvalidInput("ldl_psd expects a square matrix");
    Matrix<F> a = a_in;
    const std::size_t n = a.rows();
    LdlTerms<F> out;
    std::vector<bool> used(n, false);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t piv = n;
        F best(0);
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            if (a(i, i).re < -tol) throw InvariantViolation("matrix is not positive semidefinite");
            if (piv == n || a(i, i).re > best) {
                best = a(i, i).re;
                piv = i;
            }
        }
        if (piv == n) break;
        if (best == 0 || best <= tol) {
            // Remaining block must vanish for PSD.
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (!used[i] && !used[j] && norm2(a(i, j)) > tol * tol + (tol == 0 ? F(0) : tol))
                        throw InvariantViolation("matrix is not positive semidefinite");
            break;
        }
        used[piv] = true;
        Vector<F> l(n);
        for (std::size_t i = 0; i < n; ++i) l[i] = used[i] && i != piv ? Complex<F>() : a(i, piv) / Complex<F>(best);
        l[piv] = Complex<F>(1);
        for (std::size_t i = 0; i < n; ++i) {
            if (l[i].is_zero()) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (l[j].is_zero()) continue;
                a(i, j) -= best * (l[i] * conj(l[j]));
            }
        }
        out.weights.push_back(best);
        out.vectors.push_back(std::move(l));
    }
    return out;
}

// ---------------------------------------------------------------------------

template <class F>
std::string density_defect(const Matrix<F>& m, const F& tol) {
    if (!m.square() || m.rows() == 0) return "density matrix must be square and nonempty";
    const std::size_t n = m.rows();
    const F tol2 = tol * tol;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            if (norm2(m(i, j) - conj(m(j, i))) > tol2) return "density matrix is not Hermitian";
    Complex<F> tr;
    for (std::size_t i = 0; i < n; ++i) tr += m(i, i);
    if (norm2(tr - Complex<F>(1)) > tol2) return "density matrix trace differs from 1";
    try {
        ldl_psd(m, tol);
    } catch (const InvariantViolation&) {
        return "density matrix is not positive semidefinite";
    }
    return {};
}

template <class F>
DensityMatrix<F>::DensityMatrix(Matrix<F> m, const F& tol) : m_(std::move(m)) {
    auto defect = density_defect(m_, tol);
    if (!defect.empty()) throw InvalidInput(defect);
}

template <class F>
Vector<F> vectorize(const Matrix<F>& m) {
    return Vector<F>(m.data().begin(), m.data().end());
}

template <class F>
Vector<F> vectorize(const DensityMatrix<F>& rho) {
    return vectorize(rho.matrix());
}

template <class F>
Matrix<F> devectorize(const Vector<F>& v, std::size_t dim) {
    if (v.size() != dim * dim) throw InvalidInput("vector length is not dim^2");
    Matrix<F> m(dim, dim);
    std::copy(v.begin(), v.end(), m.data().begin());
    return m;
}

// ---------------------------------------------------------------------------

template <class F>
Superoperator<F>::Superoperator(std::size_t dim, std::vector<KrausTerm<F>> terms)
    : dim_(dim), terms_(std::move(terms)) {
    if (terms_.empty()) throw InvalidInput("a superoperator needs at least one Kraus operator");
    for (const auto& t : terms_) {
        if (t.op.rows() != dim_ || t.op.cols() != dim_)
            throw InvalidInput("Kraus operator dimension mismatch");
        if (t.weight < 0) throw InvalidInput("Kraus weights must be nonnegative");
    }
}

template <class F>
Superoperator<F> Superoperator<F>::from_kraus(std::vector<Matrix<F>> ops) {
    if (ops.empty()) throw InvalidInput("a superoperator needs at least one Kraus operator");
    std::size_t dim = ops.front().rows();
    std::vector<KrausTerm<F>> terms;
    for (auto& op : ops) terms.push_back({F(1), std::move(op)});
    return Superoperator(dim, std::move(terms));
}

template <class F>
Superoperator<F> Superoperator<F>::identity(std::size_t dim) {
    return from_kraus({Matrix<F>::identity(dim)});
}

template <class F>
KrausReport<F> validate_kraus(const Superoperator<F>& e, const F& tol) {
    Matrix<F> acc(e.dim(), e.dim());
    for (const auto& t : e.terms()) {
        Matrix<F> g = t.op.adjoint() * t.op;
        acc += g * Complex<F>(t.weight);
    }
    acc -= Matrix<F>::identity(e.dim());
    KrausReport<F> r;
    r.residual2 = frobenius2(acc);
    r.residual = std::sqrt(to_double(r.residual2));
    r.pass = r.residual2 <= tol * tol;
    return r;
}

template <class F>
Matrix<F> superop_matrix(const Superoperator<F>& e) {
    const std::size_t s = e.dim();
    Matrix<F> b(s * s, s * s);
    struct Nz {
        std::size_t i, j;
        Complex<F> v;
    };
    for (const auto& t : e.terms()) {
        std::vector<Nz> nz;
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j)
                if (!t.op(i, j).is_zero()) nz.push_back({i, j, t.op(i, j)});
        for (const auto& x : nz)
            for (const auto& y : nz) b(x.i * s + y.i, x.j * s + y.j) += t.weight * (x.v * conj(y.v));
    }
    return b;
}

template <class F>
Matrix<F> apply_raw(const Superoperator<F>& e, const Matrix<F>& m) {
    Matrix<F> out(e.dim(), e.dim());
    for (const auto& t : e.terms()) {
        Matrix<F> term = t.op * m * t.op.adjoint();
        out += term * Complex<F>(t.weight);
    }
    return out;
}

template <class F>
DensityMatrix<F> apply(const Superoperator<F>& e, const DensityMatrix<F>& rho) {
    if (e.dim() != rho.dim()) throw InvalidInput("channel and state dimensions differ");
    auto report = validate_kraus(e);
    if (!report.pass) throw InvalidInput("invalid Kraus family (residual " + std::to_string(report.residual) + ")");
    return DensityMatrix<F>::unchecked(apply_raw(e, rho.matrix()));
}

template <class F>
Superoperator<F> compose(const Superoperator<F>& second, const Superoperator<F>& first) {
    if (second.dim() != first.dim()) throw InvalidInput("cannot compose channels of different dimension");
    std::vector<KrausTerm<F>> terms;
    for (const auto& b : second.terms())
        for (const auto& a : first.terms()) {
            F w = b.weight * a.weight;
            if (w == 0) continue;
            Matrix<F> op = b.op * a.op;
            if (op.is_zero()) continue;
            terms.push_back({std::move(w), std::move(op)});
        }
    if (terms.empty()) terms.push_back({F(0), Matrix<F>(first.dim(), first.dim())});
    return Superoperator<F>(first.dim(), std::move(terms));
}

template <class F>
Superoperator<F> mix(const F& p, const Superoperator<F>& heads, const Superoperator<F>& tails) {
    if (heads.dim() != tails.dim()) throw InvalidInput("cannot mix channels of different dimension");
    std::vector<KrausTerm<F>> terms;
    const F q = F(1) - p;
    for (const auto& t : heads.terms())
        if (p != 0) terms.push_back({p * t.weight, t.op});
    for (const auto& t : tails.terms())
        if (q != 0) terms.push_back({q * t.weight, t.op});
    return Superoperator<F>(heads.dim(), std::move(terms));
}

template <class F>
Superoperator<F> convert_superop(const Superoperator<Rational>& e) {
    std::vector<KrausTerm<F>> terms;
    for (const auto& t : e.terms()) terms.push_back({from_rational<F>(t.weight), convert_matrix<F>(t.op)});
    return Superoperator<F>(e.dim(), std::move(terms));
}

template <class F>
Superoperator<F> classical_channel(const std::vector<std::vector<F>>& stochastic) {
    const std::size_t n = stochastic.size();
    std::vector<KrausTerm<F>> terms;
    for (std::size_t to = 0; to < n; ++to) {
        if (stochastic[to].size() != n) throw InvalidInput("stochastic matrix must be square");
        for (std::size_t from = 0; from < n; ++from) {
            const F& w = stochastic[to][from];
            if (w < 0) throw InvalidInput("negative transition probability");
            if (w == 0) continue;
            terms.push_back({w, Matrix<F>::unit(n, to, from)});
        }
    }
    return Superoperator<F>(n, std::move(terms));
}

template <class F>
Vector<F> SparseMatrix<F>::multiply(const Vector<F>& v) const {
    Vector<F> r(n);
    for (const auto& e : entries)
        if (!v[e.col].is_zero()) r[e.row] += e.value * v[e.col];
    return r;
}

template <class F>
Vector<F> SparseMatrix<F>::left_multiply(const Vector<F>& v) const {
    Vector<F> r(n);
    for (const auto& e : entries)
        if (!v[e.row].is_zero()) r[e.col] += v[e.row] * e.value;
    return r;
}

template <class F>
Matrix<F> SparseMatrix<F>::dense() const {
    Matrix<F> m(n, n);
    for (const auto& e : entries) m(e.row, e.col) += e.value;
    return m;
}

template <class F>
SparseMatrix<F> sparse_superop(const Superoperator<F>& e) {
    const std::size_t s = e.dim();
    std::map<std::pair<std::size_t, std::size_t>, Complex<F>> acc;
    struct Nz {
        std::size_t i, j;
        Complex<F> v;
    };
    for (const auto& t : e.terms()) {
        if (t.weight == 0) continue;
        std::vector<Nz> nz;
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j)
                if (!t.op(i, j).is_zero()) nz.push_back({i, j, t.op(i, j)});
        for (const auto& x : nz)
            for (const auto& y : nz) acc[{x.i * s + y.i, x.j * s + y.j}] += t.weight * (x.v * conj(y.v));
    }
    SparseMatrix<F> m;
    m.n = s * s;
    for (auto& [key, v] : acc)
        if (!v.is_zero()) m.entries.push_back({key.first, key.second, std::move(v)});
    return m;
}

template <class F>
SparseMatrix<F> mix_sparse(const F& p, const SparseMatrix<F>& heads, const SparseMatrix<F>& tails) {
    if (heads.n != tails.n) throw InvalidInput("cannot mix transfer matrices of different size");
    std::map<std::pair<std::size_t, std::size_t>, Complex<F>> acc;
    const F q = F(1) - p;
    if (p != 0)
        for (const auto& e : heads.entries) acc[{e.row, e.col}] += p * e.value;
    if (q != 0)
        for (const auto& e : tails.entries) acc[{e.row, e.col}] += q * e.value;
    SparseMatrix<F> m;
    m.n = heads.n;
    for (auto& [key, v] : acc)
        if (!v.is_zero()) m.entries.push_back({key.first, key.second, std::move(v)});
    return m;
}

namespace {
Real fresh(const Real& x) {
    Real y(0);
    y += x;
    return y;
}
}  // namespace

Matrix<Real> promote(const Matrix<Real>& a) {
    Matrix<Real> r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = Complex<Real>(fresh(a(i, j).re), fresh(a(i, j).im));
    return r;
}

Vector<Real> promote(const Vector<Real>& v) {
    Vector<Real> r;
    r.reserve(v.size());
    for (const auto& x : v) r.emplace_back(fresh(x.re), fresh(x.im));
    return r;
}

#define COINLAB_INSTANTIATE(F)                                                                  \
    template class Matrix<F>;                                                                   \
    template Matrix<F> operator*(const Matrix<F>&, const Matrix<F>&);                           \
    template Vector<F> operator*(const Matrix<F>&, const Vector<F>&);                           \
    template Vector<F> left_multiply(const Vector<F>&, const Matrix<F>&);                       \
    template Matrix<F> kron(const Matrix<F>&, const Matrix<F>&);                                \
    template F max_abs2(const Matrix<F>&);                                                      \
    template F max_abs2(const Vector<F>&);                                                      \
    template F frobenius2(const Matrix<F>&);                                                    \
    template Matrix<F> convert_matrix<F>(const Matrix<Rational>&);                              \
    template Vector<F> convert_vector<F>(const Vector<Rational>&);                              \
    template Complex<F> dot(const Vector<F>&, const Vector<F>&);                                \
    template Matrix<F> solve(const Matrix<F>&, const Matrix<F>&);                               \
    template Matrix<F> inverse(const Matrix<F>&);                                               \
    template std::vector<Vector<F>> nullspace(const Matrix<F>&, const F&);                      \
    template LdlTerms<F> ldl_psd(const Matrix<F>&, const F&);                                   \
    template std::string density_defect(const Matrix<F>&, const F&);                           \
    template class DensityMatrix<F>;                                                            \
    template Vector<F> vectorize(const DensityMatrix<F>&);                                      \
    template Vector<F> vectorize(const Matrix<F>&);                                             \
    template Matrix<F> devectorize(const Vector<F>&, std::size_t);                              \
    template class Superoperator<F>;                                                            \
    template KrausReport<F> validate_kraus(const Superoperator<F>&, const F&);                  \
    template Matrix<F> superop_matrix(const Superoperator<F>&);                                 \
    template DensityMatrix<F> apply(const Superoperator<F>&, const DensityMatrix<F>&);          \
    template Matrix<F> apply_raw(const Superoperator<F>&, const Matrix<F>&);                    \
    template Superoperator<F> compose(const Superoperator<F>&, const Superoperator<F>&);        \
    template Superoperator<F> mix(const F&, const Superoperator<F>&, const Superoperator<F>&);  \
    template Superoperator<F> convert_superop<F>(const Superoperator<Rational>&);               \
    template Superoperator<F> classical_channel(const std::vector<std::vector<F>>&);             \
    template struct SparseMatrix<F>;                                                            \
    template SparseMatrix<F> sparse_superop(const Superoperator<F>&);                           \
    template SparseMatrix<F> mix_sparse(const F&, const SparseMatrix<F>&, const SparseMatrix<F>&);

COINLAB_INSTANTIATE(Rational)
COINLAB_INSTANTIATE(Real)

}  // namespace coinlab
