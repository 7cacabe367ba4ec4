#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rauzy/rational.hpp"

namespace rauzy {

// Ambient dimension = number of generators. Everything is indexed by it;
// certified bounds are reported as dim <= d - 2 + delta.
class Dimension {
public:
    explicit Dimension(int d) : d_(d) {
        if (d < 3) {
            throw std::invalid_argument("dimension must be at least 3, got " + std::to_string(d));
        }
    }
    int value() const { return d_; }
    friend bool operator==(Dimension a, Dimension b) { return a.d_ == b.d_; }

private:
    int d_;
};

using Symbol = int;  // 1-based, in 1..d

// Finite sequence over {1..d}; the empty word is legal and denotes the
// identity / standard simplex.
class Word {
public:
    Word() = default;
    explicit Word(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}
    Word(std::initializer_list<Symbol> symbols) : symbols_(symbols) {}

    std::size_t size() const { return symbols_.size(); }
    bool empty() const { return symbols_.empty(); }
    Symbol operator[](std::size_t i) const { return symbols_[i]; }
    const std::vector<Symbol>& symbols() const { return symbols_; }

    Word concat(const Word& tail) const {
        std::vector<Symbol> s = symbols_;
        s.insert(s.end(), tail.symbols_.begin(), tail.symbols_.end());
        return Word(std::move(s));
    }

    void validate(Dimension d) const {
        for (Symbol s : symbols_) {
            if (s < 1 || s > d.value()) {
                throw std::invalid_argument("word symbol " + std::to_string(s) +
                                            " outside 1.." + std::to_string(d.value()));
            }
        }
    }

    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            if (i) out.push_back(',');
            out += std::to_string(symbols_[i]);
        }
        return out;
    }

    friend bool operator==(const Word& a, const Word& b) { return a.symbols_ == b.symbols_; }

private:
    std::vector<Symbol> symbols_;
};

// Dense d x d matrix over arbitrary-precision nonnegative integers.
// Entries of generator products grow exponentially in the word length, so
// there is no fixed-width representation here at all.
class BigMatrix {
public:
    explicit BigMatrix(int d) : d_(d), entries_(static_cast<std::size_t>(d) * d) {
        if (d < 1) throw std::invalid_argument("matrix dimension must be positive");
    }

    static BigMatrix identity(int d) {
        BigMatrix m(d);
        for (int i = 0; i < d; ++i) m.at(i, i) = 1;
        return m;
    }

    int dim() const { return d_; }
    BigInt& at(int i, int j) { return entries_[static_cast<std::size_t>(i) * d_ + j]; }
    const BigInt& at(int i, int j) const { return entries_[static_cast<std::size_t>(i) * d_ + j]; }

    friend bool operator==(const BigMatrix& a, const BigMatrix& b) {
        return a.d_ == b.d_ && a.entries_ == b.entries_;
    }

    // out = a * b; out must be distinct storage from a and b.
    static void multiply_into(const BigMatrix& a, const BigMatrix& b, BigMatrix& out) {
        const int d = a.d_;
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                BigInt& acc = out.at(i, j);
                acc = 0;
                for (int k = 0; k < d; ++k) {
                    mpz_addmul(acc.get_mpz_t(), a.at(i, k).get_mpz_t(), b.at(k, j).get_mpz_t());
                }
            }
        }
    }

    BigMatrix operator*(const BigMatrix& rhs) const {
        if (d_ != rhs.d_) throw std::invalid_argument("matrix dimension mismatch");
        BigMatrix out(d_);
        multiply_into(*this, rhs, out);
        return out;
    }

private:
    int d_;
    std::vector<BigInt> entries_;
};

// M_j: ones on the main diagonal and the j-th row, zeros elsewhere.
inline BigMatrix generator_matrix(Dimension d, Symbol j) {
    if (j < 1 || j > d.value()) {
        throw std::invalid_argument("generator index " + std::to_string(j) + " outside 1.." +
                                    std::to_string(d.value()));
    }
    BigMatrix m(d.value());
    for (int i = 0; i < d.value(); ++i) {
        for (int k = 0; k < d.value(); ++k) {
            if (i == j - 1 || i == k) m.at(i, k) = 1;
        }
    }
    return m;
}

// Left-to-right product of generators; the empty word gives the identity.
inline BigMatrix word_matrix(Dimension d, const Word& w) {
    w.validate(d);
    BigMatrix acc = BigMatrix::identity(d.value());
    BigMatrix tmp(d.value());
    for (Symbol s : w.symbols()) {
        BigMatrix gen = generator_matrix(d, s);
        BigMatrix::multiply_into(acc, gen, tmp);
        std::swap(acc, tmp);
    }
    return acc;
}

inline std::vector<BigInt> column_norms(const BigMatrix& m) {
    std::vector<BigInt> sums(static_cast<std::size_t>(m.dim()));
    for (int j = 0; j < m.dim(); ++j) {
        for (int i = 0; i < m.dim(); ++i) {
            sums[j] += m.at(i, j);
        }
    }
    return sums;
}

// nu(M) = product over columns of (column sum)^{-1}. For M a generator
// product this is the volume of the cylinder simplex relative to vol(Delta).
inline Rational nu(const BigMatrix& m) {
    BigInt prod = 1;
    for (int j = 0; j < m.dim(); ++j) {
        BigInt sum;
        for (int i = 0; i < m.dim(); ++i) sum += m.at(i, j);
        if (sum == 0) {
            throw std::domain_error("nu undefined: column " + std::to_string(j + 1) +
                                    " sums to zero");
        }
        prod *= sum;
    }
    return make_rational(1, prod);
}

// Exact point of the standard simplex: nonnegative coordinates with sum 1.
class BaryPoint {
public:
    explicit BaryPoint(std::vector<Rational> coords) : coords_(std::move(coords)) {
        Rational sum;
        for (const Rational& c : coords_) {
            if (c < 0) throw std::invalid_argument("barycentric coordinate below zero");
            sum += c;
        }
        if (sum != 1) throw std::invalid_argument("barycentric coordinates must sum to 1");
    }

    static BaryPoint vertex(Dimension d, Symbol j) {
        if (j < 1 || j > d.value()) throw std::invalid_argument("vertex index out of range");
        std::vector<Rational> c(static_cast<std::size_t>(d.value()));
        c[static_cast<std::size_t>(j - 1)] = 1;
        return BaryPoint(std::move(c));
    }

    static BaryPoint barycenter(Dimension d) {
        std::vector<Rational> c(static_cast<std::size_t>(d.value()),
                                make_rational(1, d.value()));
        return BaryPoint(std::move(c));
    }

    int dim() const { return static_cast<int>(coords_.size()); }
    const Rational& operator[](std::size_t i) const { return coords_[i]; }
    const std::vector<Rational>& coords() const { return coords_; }

    friend bool operator==(const BaryPoint& a, const BaryPoint& b) {
        return a.coords_ == b.coords_;
    }

private:
    std::vector<Rational> coords_;
};

// T_j(x) = M_j x / |M_j x|, evaluated exactly.
inline BaryPoint apply_map(Dimension d, Symbol j, const BaryPoint& v) {
    if (v.dim() != d.value()) throw std::invalid_argument("point dimension mismatch");
    BigMatrix m = generator_matrix(d, j);
    std::vector<Rational> image(static_cast<std::size_t>(d.value()));
    Rational norm;
    for (int i = 0; i < d.value(); ++i) {
        Rational acc;
        for (int k = 0; k < d.value(); ++k) {
            if (m.at(i, k) != 0) acc += v[static_cast<std::size_t>(k)];
        }
        image[static_cast<std::size_t>(i)] = acc;
        norm += acc;
    }
    for (Rational& c : image) c /= norm;
    return BaryPoint(std::move(image));
}

// T_w = T_{w_1} o ... o T_{w_n}, so the last symbol acts first.
inline BaryPoint apply_word(Dimension d, const Word& w, BaryPoint v) {
    w.validate(d);
    for (std::size_t i = w.size(); i > 0; --i) {
        v = apply_map(d, w[i - 1], v);
    }
    return v;
}

// Ordered d-tuple of vertices; vertex j is the image of e_j.
class Simplex {
public:
    explicit Simplex(std::vector<BaryPoint> vertices) : vertices_(std::move(vertices)) {
        if (vertices_.empty()) throw std::invalid_argument("simplex needs vertices");
        for (const BaryPoint& v : vertices_) {
            if (v.dim() != static_cast<int>(vertices_.size())) {
                throw std::invalid_argument("simplex must have d vertices of dimension d");
            }
        }
    }

    static Simplex standard(Dimension d) {
        std::vector<BaryPoint> vs;
        vs.reserve(static_cast<std::size_t>(d.value()));
        for (int j = 1; j <= d.value(); ++j) vs.push_back(BaryPoint::vertex(d, j));
        return Simplex(std::move(vs));
    }

    int dim() const { return static_cast<int>(vertices_.size()); }
    const BaryPoint& vertex(std::size_t j) const { return vertices_[j]; }
    const std::vector<BaryPoint>& vertices() const { return vertices_; }

    friend bool operator==(const Simplex& a, const Simplex& b) {
        return a.vertices_ == b.vertices_;
    }

private:
    std::vector<BaryPoint> vertices_;
};

// Cylinder simplex for w: vertex j is column j of M_w scaled by the inverse
// column sum.
inline Simplex word_simplex(Dimension d, const Word& w) {
    BigMatrix m = word_matrix(d, w);
    std::vector<BaryPoint> vertices;
    vertices.reserve(static_cast<std::size_t>(d.value()));
    for (int j = 0; j < d.value(); ++j) {
        BigInt sum;
        for (int i = 0; i < d.value(); ++i) sum += m.at(i, j);
        std::vector<Rational> coords(static_cast<std::size_t>(d.value()));
        for (int i = 0; i < d.value(); ++i) {
            coords[static_cast<std::size_t>(i)] = make_rational(m.at(i, j), sum);
        }
        vertices.emplace_back(std::move(coords));
    }
    return Simplex(std::move(vertices));
}

// Exact determinant by fraction-free style Gaussian elimination over Q.
inline Rational rational_determinant(std::vector<std::vector<Rational>> a) {
    const std::size_t n = a.size();
    Rational det = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) return Rational(0);
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (std::size_t row = col + 1; row < n; ++row) {
            if (a[row][col] == 0) continue;
            Rational factor = a[row][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) {
                a[row][k] -= factor * a[col][k];
            }
        }
    }
    return det;
}

// Independent volume oracle: |det| of the matrix whose columns are the
// simplex vertices. For word simplices this equals nu(M_w); the two routes
// share no code, which is the point.
inline Rational volume_ratio_oracle(const Simplex& s) {
    const int d = s.dim();
    std::vector<std::vector<Rational>> cols(static_cast<std::size_t>(d),
                                            std::vector<Rational>(static_cast<std::size_t>(d)));
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            cols[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                s.vertex(static_cast<std::size_t>(j))[static_cast<std::size_t>(i)];
        }
    }
    Rational det = rational_determinant(std::move(cols));
    return det < 0 ? Rational(-det) : det;
}

inline Rational matrix_determinant(const BigMatrix& m) {
    const int d = m.dim();
    std::vector<std::vector<Rational>> rows(static_cast<std::size_t>(d),
                                            std::vector<Rational>(static_cast<std::size_t>(d)));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = Rational(m.at(i, j));
        }
    }
    return rational_determinant(std::move(rows));
}

}  // namespace rauzy
