#include "twic/gf2.hpp"

#include <bit>

namespace twic {

bool Gf2Vec::dot(const Gf2Vec& other) const {
    std::uint64_t acc = 0;
    const size_t n = words_.size() < other.words_.size() ? words_.size() : other.words_.size();
    for (size_t w = 0; w < n; ++w) acc ^= words_[w] & other.words_[w];
    return std::popcount(acc) & 1;
}

int Gf2Vec::lowest_set() const {
    for (size_t w = 0; w < words_.size(); ++w)
        if (words_[w]) return static_cast<int>(w * 64) + std::countr_zero(words_[w]);
    return -1;
}

int Gf2Mat::rank() const {
    Gf2Span span(cols_);
    for (const auto& r : rows_) span.insert(r);
    return span.rank();
}

bool Gf2Span::insert(Gf2Vec v) {
    reduce(v);
    const int p = v.lowest_set();
    if (p < 0) return false;
    // Keep the basis reduced so pivots stay unique.
    for (size_t i = 0; i < basis_.size(); ++i)
        if (basis_[i].test(p)) basis_[i].xor_with(v);
    basis_.push_back(std::move(v));
    pivots_.push_back(p);
    return true;
}

bool Gf2Span::contains(Gf2Vec v) const {
    reduce(v);
    return v.is_zero();
}

void Gf2Span::reduce(Gf2Vec& v) const {
    for (size_t i = 0; i < basis_.size(); ++i)
        if (v.test(pivots_[i])) v.xor_with(basis_[i]);
}

}  // namespace twic
