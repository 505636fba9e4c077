// Copyright 2026 The lrsd-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef LRSD_PAULI_HPP
#define LRSD_PAULI_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lrsd/error.hpp"

namespace lrsd {

/// Single-qubit letter; bit 0 is the x bit, bit 1 the z bit.
enum class Letter : uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

inline char letter_char(Letter p) {
    return "IXZY"[static_cast<uint8_t>(p)];
}

inline size_t words_for(size_t n_qubits) {
    return (n_qubits + 63) / 64;
}

/// An n-qubit Pauli operator i^phase * P_0 (x) ... (x) P_{n-1}, with Y stored as
/// (x, z) = (1, 1). Hermitian strings therefore carry phase 0 or 2.
class PauliString {
   public:
    PauliString() = default;
    explicit PauliString(size_t n_qubits) : n_(n_qubits), phase_(0), words_(2 * words_for(n_qubits), 0) {
    }

    static PauliString single(size_t n_qubits, size_t site, Letter p) {
        PauliString r(n_qubits);
        r.set_letter(site, p);
        return r;
    }

    /// Parses "[+|-][i]" followed by letters from IXYZ (or '_' for identity).
    static PauliString from_text(std::string_view text) {
        size_t k = 0;
        uint8_t phase = 0;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) {
            phase = text[k] == '-' ? 2 : 0;
            k++;
        }
        if (k < text.size() && text[k] == 'i') {
            phase = (phase + 1) & 3;
            k++;
        }
        PauliString r(text.size() - k);
        for (size_t q = 0; k < text.size(); k++, q++) {
            switch (text[k]) {
                case 'I':
                case '_': break;
                case 'X': r.set_letter(q, Letter::X); break;
                case 'Y': r.set_letter(q, Letter::Y); break;
                case 'Z': r.set_letter(q, Letter::Z); break;
                default: fail(ErrorKind::ParseError, "bad Pauli character in '" + std::string(text) + "'");
            }
        }
        if (r.n_ == 0) {
            fail(ErrorKind::ParseError, "empty Pauli string");
        }
        r.phase_ = phase;
        return r;
    }

    size_t n_qubits() const {
        return n_;
    }
    size_t n_words() const {
        return words_.size() / 2;
    }
    uint8_t phase() const {
        return phase_;
    }
    void set_phase(uint8_t phase) {
        phase_ = phase & 3;
    }
    void add_phase(int delta) {
        phase_ = static_cast<uint8_t>((phase_ + delta) & 3);
    }
    bool is_hermitian() const {
        return (phase_ & 1) == 0;
    }
    /// +1 or -1 for Hermitian strings.
    int sign() const {
        return phase_ == 0 ? 1 : -1;
    }

    uint64_t *xs() {
        return words_.data();
    }
    uint64_t *zs() {
        return words_.data() + n_words();
    }
    const uint64_t *xs() const {
        return words_.data();
    }
    const uint64_t *zs() const {
        return words_.data() + n_words();
    }

    bool x(size_t q) const {
        return (xs()[q >> 6] >> (q & 63)) & 1;
    }
    bool z(size_t q) const {
        return (zs()[q >> 6] >> (q & 63)) & 1;
    }
    void set_x(size_t q, bool v) {
        set_bit(xs(), q, v);
    }
    void set_z(size_t q, bool v) {
        set_bit(zs(), q, v);
    }
    Letter letter(size_t q) const {
        return static_cast<Letter>(static_cast<uint8_t>(x(q)) | (static_cast<uint8_t>(z(q)) << 1));
    }
    void set_letter(size_t q, Letter p) {
        check_site(q);
        set_x(q, static_cast<uint8_t>(p) & 1);
        set_z(q, static_cast<uint8_t>(p) & 2);
    }

    bool is_identity() const {
        return std::all_of(words_.begin(), words_.end(), [](uint64_t w) { return w == 0; });
    }
    size_t weight() const {
        size_t w = 0;
        for (size_t k = 0; k < n_words(); k++) {
            w += std::popcount(xs()[k] | zs()[k]);
        }
        return w;
    }

    /// Right multiplication: *this <- *this * rhs, with exact phase.
    PauliString &operator*=(const PauliString &rhs) {
        check_same(rhs);
        int delta = 0;
        uint64_t *ax = xs();
        uint64_t *az = zs();
        const uint64_t *bx = rhs.xs();
        const uint64_t *bz = rhs.zs();
        for (size_t k = 0; k < n_words(); k++) {
            uint64_t a_x = ax[k] & ~az[k], a_y = ax[k] & az[k], a_z = ~ax[k] & az[k];
            uint64_t b_x = bx[k] & ~bz[k], b_y = bx[k] & bz[k], b_z = ~bx[k] & bz[k];
            uint64_t plus = (a_x & b_y) | (a_y & b_z) | (a_z & b_x);
            uint64_t minus = (a_y & b_x) | (a_z & b_y) | (a_x & b_z);
            delta += std::popcount(plus) - std::popcount(minus);
            ax[k] ^= bx[k];
            az[k] ^= bz[k];
        }
        phase_ = static_cast<uint8_t>((phase_ + rhs.phase_ + delta) & 3);
        return *this;
    }

    /// Same letters on every site, phase ignored.
    bool same_letters(const PauliString &other) const {
        return n_ == other.n_ && words_ == other.words_;
    }
    /// Lexicographic order on the (x, z) words; phase ignored.
    bool letters_less(const PauliString &other) const {
        return words_ < other.words_;
    }

    bool operator==(const PauliString &other) const {
        return n_ == other.n_ && phase_ == other.phase_ && words_ == other.words_;
    }
    bool operator!=(const PauliString &other) const {
        return !(*this == other);
    }

    std::string str() const {
        std::string out;
        out += (phase_ & 2) ? '-' : '+';
        if (phase_ & 1) {
            out += 'i';
        }
        for (size_t q = 0; q < n_; q++) {
            out += letter_char(letter(q));
        }
        return out;
    }

    // Conjugation P -> G P G^dagger by the named Clifford.
    void conjugate_h(size_t q) {
        bool xv = x(q), zv = z(q);
        if (xv && zv) {
            phase_ ^= 2;
        }
        set_x(q, zv);
        set_z(q, xv);
    }
    void conjugate_s(size_t q) {
        bool xv = x(q), zv = z(q);
        if (xv && zv) {
            phase_ ^= 2;
        }
        set_z(q, zv ^ xv);
    }
    void conjugate_sdg(size_t q) {
        bool xv = x(q), zv = z(q);
        if (xv && !zv) {
            phase_ ^= 2;
        }
        set_z(q, zv ^ xv);
    }
    void conjugate_x(size_t q) {
        if (z(q)) {
            phase_ ^= 2;
        }
    }
    void conjugate_y(size_t q) {
        if (x(q) != z(q)) {
            phase_ ^= 2;
        }
    }
    void conjugate_z(size_t q) {
        if (x(q)) {
            phase_ ^= 2;
        }
    }
    void conjugate_cz(size_t a, size_t b) {
        bool xa = x(a), za = z(a), xb = x(b), zb = z(b);
        if (xa && xb && (za != zb)) {
            phase_ ^= 2;
        }
        set_z(a, za ^ xb);
        set_z(b, zb ^ xa);
    }
    void conjugate_cx(size_t c, size_t t) {
        bool xc = x(c), zc = z(c), xt = x(t), zt = z(t);
        if (xc && zt && (xt == zc)) {
            phase_ ^= 2;
        }
        set_x(t, xt ^ xc);
        set_z(c, zc ^ zt);
    }

    void check_site(size_t q) const {
        if (q >= n_) {
            fail(ErrorKind::IndexOutOfRange, "site " + std::to_string(q) + " outside " + std::to_string(n_) + " qubits");
        }
    }
    void check_same(const PauliString &other) const {
        if (other.n_ != n_) {
            fail(ErrorKind::LengthMismatch,
                 "Pauli strings of length " + std::to_string(n_) + " and " + std::to_string(other.n_));
        }
    }

    const std::vector<uint64_t> &raw_words() const {
        return words_;
    }

   private:
    static void set_bit(uint64_t *w, size_t q, bool v) {
        uint64_t m = uint64_t{1} << (q & 63);
        if (v) {
            w[q >> 6] |= m;
        } else {
            w[q >> 6] &= ~m;
        }
    }

    size_t n_ = 0;
    uint8_t phase_ = 0;
    std::vector<uint64_t> words_;
};

/// 0 if a and b commute, 1 if they anticommute.
inline int symplectic_product(const PauliString &a, const PauliString &b) {
    a.check_same(b);
    uint64_t acc = 0;
    for (size_t k = 0; k < a.n_words(); k++) {
        acc ^= (a.xs()[k] & b.zs()[k]) ^ (a.zs()[k] & b.xs()[k]);
    }
    return std::popcount(acc) & 1;
}

inline bool anticommutes(const PauliString &a, const PauliString &b) {
    return symplectic_product(a, b) != 0;
}

inline PauliString multiply(const PauliString &a, const PauliString &b) {
    PauliString r = a;
    r *= b;
    return r;
}

inline PauliString substitute_site(const PauliString &p, size_t site, Letter letter) {
    PauliString r = p;
    r.set_letter(site, letter);
    return r;
}

inline std::ostream &operator<<(std::ostream &out, const PauliString &p) {
    return out << p.str();
}

}  // namespace lrsd

#endif
