#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace perturb {

/// Subset of [0, n) stored as a fixed-width bit vector.
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(int n) : n_(n), words_((n + 63) / 64, 0) {}

    static VertexSet of(int n, std::initializer_list<int> vs) {
        VertexSet s(n);
        for (int v : vs) s.set(v);
        return s;
    }
    static VertexSet from_vertices(int n, const std::vector<int>& vs) {
        VertexSet s(n);
        for (int v : vs) s.set(v);
        return s;
    }
    static VertexSet full(int n) {
        VertexSet s(n);
        for (int v = 0; v < n; ++v) s.set(v);
        return s;
    }

    int capacity() const { return n_; }

    bool test(int v) const {
        check(v);
        return (words_[v >> 6] >> (v & 63)) & 1;
    }
    void set(int v) {
        check(v);
        words_[v >> 6] |= uint64_t(1) << (v & 63);
    }
    void reset(int v) {
        check(v);
        words_[v >> 6] &= ~(uint64_t(1) << (v & 63));
    }

    int count() const {
        int c = 0;
        for (uint64_t w : words_) c += std::popcount(w);
        return c;
    }
    bool empty() const {
        for (uint64_t w : words_) if (w) return false;
        return true;
    }

    /// -1 if empty.
    int first() const {
        for (size_t i = 0; i < words_.size(); ++i)
            if (words_[i]) return int(i * 64 + std::countr_zero(words_[i]));
        return -1;
    }

    bool contains(const VertexSet& other) const {
        same(other);
        for (size_t i = 0; i < words_.size(); ++i)
            if (other.words_[i] & ~words_[i]) return false;
        return true;
    }
    bool intersects(const VertexSet& other) const {
        same(other);
        for (size_t i = 0; i < words_.size(); ++i)
            if (other.words_[i] & words_[i]) return true;
        return false;
    }

    VertexSet& operator|=(const VertexSet& o) {
        same(o);
        for (size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    VertexSet& operator&=(const VertexSet& o) {
        same(o);
        for (size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    VertexSet& operator-=(const VertexSet& o) {
        same(o);
        for (size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }
    friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
    friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
    friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }

    bool operator==(const VertexSet& o) const = default;

    std::vector<int> vertices() const {
        std::vector<int> out;
        out.reserve(count());
        for (size_t i = 0; i < words_.size(); ++i) {
            uint64_t w = words_[i];
            while (w) {
                out.push_back(int(i * 64 + std::countr_zero(w)));
                w &= w - 1;
            }
        }
        return out;
    }

    /// Order of sorted vertex lists compared as sequences:
    /// {0,1} < {0,1,3} < {0,2}.
    static bool lex_less(const VertexSet& a, const VertexSet& b) {
        a.same(b);
        for (size_t i = 0; i < a.words_.size(); ++i) {
            uint64_t x = a.words_[i] ^ b.words_[i];
            if (!x) continue;
            int m = int(i * 64 + std::countr_zero(x));
            // Vertices below m agree. Whoever owns m is smaller, unless the
            // other set has nothing >= m (then it is a proper prefix).
            const VertexSet& owner = a.test(m) ? a : b;
            const VertexSet& rest = a.test(m) ? b : a;
            bool rest_has_tail = false;
            for (size_t j = i; j < a.words_.size() && !rest_has_tail; ++j) {
                uint64_t w = rest.words_[j];
                if (j == size_t(i)) w &= ~((uint64_t(1) << (m & 63)) - 1);
                if (w) rest_has_tail = true;
            }
            if (!rest_has_tail) return &rest == &a;  // a is a prefix of b
            return &owner == &a;
        }
        return false;  // equal
    }

    std::string to_string() const {
        std::string s = "{";
        bool fst = true;
        for (int v : vertices()) {
            if (!fst) s += ",";
            s += std::to_string(v);
            fst = false;
        }
        return s + "}";
    }

private:
    void check(int v) const {
        if (v < 0 || v >= n_) throw std::out_of_range("VertexSet: vertex " + std::to_string(v) + " outside [0," + std::to_string(n_) + ")");
    }
    void same(const VertexSet& o) const {
        if (n_ != o.n_) throw std::invalid_argument("VertexSet: capacity mismatch");
    }

    int n_ = 0;
    std::vector<uint64_t> words_;
};

}  // namespace perturb
