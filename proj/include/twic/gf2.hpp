#pragma once

#include <cstdint>
#include <vector>

namespace twic {

/// Dense GF(2) row vector over 64-bit words.
class Gf2Vec {
  public:
    Gf2Vec() = default;
    explicit Gf2Vec(int size) : size_(size), words_((size + 63) / 64, 0) {}

    int size() const { return size_; }
    bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(int i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void flip(int i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    void xor_with(const Gf2Vec& other) {
        for (size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    }
    bool is_zero() const {
        for (auto w : words_)
            if (w) return false;
        return true;
    }
    /// Parity of the AND with another vector (GF(2) dot product).
    bool dot(const Gf2Vec& other) const;

    /// Index of the lowest set bit, or -1 if zero.
    int lowest_set() const;

    friend bool operator==(const Gf2Vec& a, const Gf2Vec& b) {
        return a.size_ == b.size_ && a.words_ == b.words_;
    }

  private:
    int size_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Dense GF(2) matrix, row-major.
class Gf2Mat {
  public:
    Gf2Mat() = default;
    Gf2Mat(int rows, int cols) : cols_(cols), rows_(rows, Gf2Vec(cols)) {}

    int rows() const { return static_cast<int>(rows_.size()); }
    int cols() const { return cols_; }
    Gf2Vec& row(int r) { return rows_[r]; }
    const Gf2Vec& row(int r) const { return rows_[r]; }
    void add_row(const Gf2Vec& v) { rows_.push_back(v); }

    int rank() const;

  private:
    int cols_ = 0;
    std::vector<Gf2Vec> rows_;
};

/// Incremental row-echelon basis of a GF(2) row space. Supports membership
/// queries and certificate extraction (how a vector decomposes over the
/// inserted generators).
class Gf2Span {
  public:
    explicit Gf2Span(int cols) : cols_(cols) {}

    int cols() const { return cols_; }
    int rank() const { return static_cast<int>(basis_.size()); }

    /// Inserts a vector; returns false if it was already in the span.
    bool insert(Gf2Vec v);

    bool contains(Gf2Vec v) const;

    /// Reduces v by the basis in place; the residue is zero iff v is in the span.
    void reduce(Gf2Vec& v) const;

  private:
    int cols_;
    std::vector<Gf2Vec> basis_;  // each with a unique pivot (lowest set bit)
    std::vector<int> pivots_;
};

}  // namespace twic
