#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "wildtame/integer.hpp"

namespace wildtame {

/* Dense matrix over Z, column-vector convention: an r x c matrix maps Z^c -> Z^r. */
class IntMatrix {
  public:
    IntMatrix() : rows_(0), cols_(0) {}
    IntMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, Int(0)) {}

    static IntMatrix identity(std::size_t n) {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    static IntMatrix from_rows(const std::vector<std::vector<Int>> &rows) {
        std::size_t r = rows.size();
        std::size_t c = r == 0 ? 0 : rows[0].size();
        IntMatrix m(r, c);
        for (std::size_t i = 0; i < r; ++i) {
            if (rows[i].size() != c)
                throw std::invalid_argument("IntMatrix::from_rows: ragged rows");
            for (std::size_t j = 0; j < c; ++j) m.at(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Int &at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Int &at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    bool operator==(const IntMatrix &o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    IntMatrix operator*(const IntMatrix &o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("IntMatrix: dimension mismatch in product");
        IntMatrix out(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const Int &a = at(i, k);
                if (a == 0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) out.at(i, j) += a * o.at(k, j);
            }
        return out;
    }

    IntMatrix operator+(const IntMatrix &o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("IntMatrix: dimension mismatch in sum");
        IntMatrix out(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] + o.data_[i];
        return out;
    }

    IntMatrix operator-(const IntMatrix &o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("IntMatrix: dimension mismatch in difference");
        IntMatrix out(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] - o.data_[i];
        return out;
    }

    IntMatrix operator*(const Int &s) const {
        IntMatrix out(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] * s;
        return out;
    }

    IntMatrix transpose() const {
        IntMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out.at(j, i) = at(i, j);
        return out;
    }

    std::vector<Int> apply(const std::vector<Int> &x) const {
        if (x.size() != cols_) throw std::invalid_argument("IntMatrix::apply: size mismatch");
        std::vector<Int> y(rows_, Int(0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) y[i] += at(i, j) * x[j];
        return y;
    }

    bool is_zero() const {
        for (const Int &v : data_)
            if (v != 0) return false;
        return true;
    }

    void swap_rows(std::size_t a, std::size_t b) {
        for (std::size_t j = 0; j < cols_; ++j) std::swap(at(a, j), at(b, j));
    }
    void swap_cols(std::size_t a, std::size_t b) {
        for (std::size_t i = 0; i < rows_; ++i) std::swap(at(i, a), at(i, b));
    }
    /* row[a] += q * row[b] */
    void add_row(std::size_t a, std::size_t b, const Int &q) {
        for (std::size_t j = 0; j < cols_; ++j) at(a, j) += q * at(b, j);
    }
    void add_col(std::size_t a, std::size_t b, const Int &q) {
        for (std::size_t i = 0; i < rows_; ++i) at(i, a) += q * at(i, b);
    }
    void negate_row(std::size_t a) {
        for (std::size_t j = 0; j < cols_; ++j) at(a, j) = -at(a, j);
    }
    void negate_col(std::size_t a) {
        for (std::size_t i = 0; i < rows_; ++i) at(i, a) = -at(i, a);
    }

    IntMatrix column(std::size_t j) const {
        IntMatrix out(rows_, 1);
        for (std::size_t i = 0; i < rows_; ++i) out.at(i, 0) = at(i, j);
        return out;
    }

    std::vector<Int> column_vec(std::size_t j) const {
        std::vector<Int> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i) out[i] = at(i, j);
        return out;
    }

    /* Exact determinant, Bareiss fraction-free elimination. */
    Int det() const {
        if (rows_ != cols_) throw std::invalid_argument("IntMatrix::det: not square");
        std::size_t n = rows_;
        if (n == 0) return 1;
        IntMatrix m = *this;
        Int sign = 1, prev = 1;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (m.at(k, k) == 0) {
                std::size_t piv = k + 1;
                while (piv < n && m.at(piv, k) == 0) ++piv;
                if (piv == n) return 0;
                m.swap_rows(k, piv);
                sign = -sign;
            }
            for (std::size_t i = k + 1; i < n; ++i)
                for (std::size_t j = k + 1; j < n; ++j) {
                    Int num = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                    m.at(i, j) = num / prev;
                }
            prev = m.at(k, k);
        }
        return sign * m.at(n - 1, n - 1);
    }

  private:
    std::size_t rows_, cols_;
    std::vector<Int> data_;
};

struct HnfResult {
    IntMatrix h;  /* H = U * A, row Hermite normal form */
    IntMatrix u;  /* unimodular */
    std::size_t rank = 0;
};

/* Row-style HNF: pivots positive, entries above a pivot reduced into [0, pivot). */
inline HnfResult hnf(const IntMatrix &a) {
    std::size_t r = a.rows(), c = a.cols();
    HnfResult res{a, IntMatrix::identity(r), 0};
    IntMatrix &h = res.h;
    IntMatrix &u = res.u;
    std::size_t cursor = 0;
    for (std::size_t j = 0; j < c && cursor < r; ++j) {
        /* gcd elimination in column j among rows >= cursor */
        for (;;) {
            std::size_t best = r;
            for (std::size_t i = cursor; i < r; ++i)
                if (h.at(i, j) != 0 && (best == r || abs_int(h.at(i, j)) < abs_int(h.at(best, j))))
                    best = i;
            if (best == r) break;
            if (best != cursor) {
                h.swap_rows(cursor, best);
                u.swap_rows(cursor, best);
            }
            bool clean = true;
            for (std::size_t i = cursor + 1; i < r; ++i) {
                if (h.at(i, j) == 0) continue;
                Int q = h.at(i, j) / h.at(cursor, j);
                h.add_row(i, cursor, -q);
                u.add_row(i, cursor, -q);
                if (h.at(i, j) != 0) clean = false;
            }
            if (clean) break;
        }
        if (h.at(cursor, j) == 0) continue;
        if (h.at(cursor, j) < 0) {
            h.negate_row(cursor);
            u.negate_row(cursor);
        }
        for (std::size_t i = 0; i < cursor; ++i) {
            Int q = h.at(i, j) / h.at(cursor, j);
            if (h.at(i, j) - q * h.at(cursor, j) < 0) q -= 1;  /* floor division */
            if (q != 0) {
                h.add_row(i, cursor, -q);
                u.add_row(i, cursor, -q);
            }
        }
        ++cursor;
    }
    res.rank = cursor;
    return res;
}

struct SnfResult {
    IntMatrix d;  /* D = U * A * V, diagonal, d1 | d2 | ..., nonneg */
    IntMatrix u;
    IntMatrix v;
    std::size_t rank = 0;
};

inline SnfResult snf(const IntMatrix &a) {
    std::size_t r = a.rows(), c = a.cols();
    SnfResult res{a, IntMatrix::identity(r), IntMatrix::identity(c), 0};
    IntMatrix &d = res.d;
    IntMatrix &u = res.u;
    IntMatrix &v = res.v;
    std::size_t n = std::min(r, c);
    for (std::size_t t = 0; t < n; ++t) {
        for (;;) {
            /* move the smallest nonzero entry of the trailing block to (t,t) */
            std::size_t bi = r, bj = c;
            for (std::size_t i = t; i < r; ++i)
                for (std::size_t j = t; j < c; ++j)
                    if (d.at(i, j) != 0 &&
                        (bi == r || abs_int(d.at(i, j)) < abs_int(d.at(bi, bj)))) {
                        bi = i;
                        bj = j;
                    }
            if (bi == r) break;
            if (bi != t) {
                d.swap_rows(t, bi);
                u.swap_rows(t, bi);
            }
            if (bj != t) {
                d.swap_cols(t, bj);
                v.swap_cols(t, bj);
            }
            bool clean = true;
            for (std::size_t i = t + 1; i < r; ++i) {
                if (d.at(i, t) == 0) continue;
                Int q = d.at(i, t) / d.at(t, t);
                d.add_row(i, t, -q);
                u.add_row(i, t, -q);
                if (d.at(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < c; ++j) {
                if (d.at(t, j) == 0) continue;
                Int q = d.at(t, j) / d.at(t, t);
                d.add_col(j, t, -q);
                v.add_col(j, t, -q);
                if (d.at(t, j) != 0) clean = false;
            }
            if (!clean) continue;
            /* divisibility sweep: pivot must divide the trailing block */
            bool divides = true;
            for (std::size_t i = t + 1; i < r && divides; ++i)
                for (std::size_t j = t + 1; j < c && divides; ++j)
                    if (d.at(i, j) % d.at(t, t) != 0) {
                        d.add_row(t, i, 1);
                        u.add_row(t, i, 1);
                        divides = false;
                    }
            if (divides) break;
        }
        if (d.at(t, t) < 0) {
            d.negate_row(t);
            u.negate_row(t);
        }
        if (d.at(t, t) != 0) res.rank = t + 1;
    }
    return res;
}

/* Basis of {x in Z^c : A x = 0}, as columns. */
inline IntMatrix kernel_lattice(const IntMatrix &a) {
    SnfResult s = snf(a);
    std::size_t c = a.cols();
    std::size_t k = c - s.rank;
    IntMatrix out(c, k);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < c; ++i) out.at(i, j) = s.v.at(i, s.rank + j);
    return out;
}

/* Particular solution of A x = b over Z, if one exists. */
inline std::optional<std::vector<Int>> solve_integer(const IntMatrix &a, const std::vector<Int> &b) {
    if (b.size() != a.rows()) throw std::invalid_argument("solve_integer: size mismatch");
    SnfResult s = snf(a);
    std::vector<Int> cvec = s.u.apply(b);
    std::size_t n = std::min(a.rows(), a.cols());
    std::vector<Int> y(a.cols(), Int(0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Int di = i < n ? s.d.at(i, i) : Int(0);
        if (di == 0) {
            if (cvec[i] != 0) return std::nullopt;
        } else {
            if (cvec[i] % di != 0) return std::nullopt;
            if (i < a.cols()) y[i] = cvec[i] / di;
        }
    }
    return s.v.apply(y);
}

}  // namespace wildtame
