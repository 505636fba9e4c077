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
#ifndef LRSD_F2_HPP
#define LRSD_F2_HPP

#include <bit>
#include <cstdint>
#include <vector>

namespace lrsd {

using BitRow = std::vector<uint64_t>;

inline bool bit_get(const BitRow &row, size_t k) {
    return (row[k >> 6] >> (k & 63)) & 1;
}

inline void bit_set(BitRow &row, size_t k) {
    row[k >> 6] |= uint64_t{1} << (k & 63);
}

inline void bit_xor(BitRow &dst, const BitRow &src) {
    for (size_t k = 0; k < dst.size(); k++) {
        dst[k] ^= src[k];
    }
}

inline bool is_zero(const BitRow &row) {
    for (uint64_t w : row) {
        if (w) {
            return false;
        }
    }
    return true;
}

inline size_t lowest_bit(const BitRow &row) {
    for (size_t k = 0; k < row.size(); k++) {
        if (row[k]) {
            return (k << 6) + std::countr_zero(row[k]);
        }
    }
    return SIZE_MAX;
}

/// Online F2 row reduction: inserting a vector either extends the span or is
/// reduced to zero. Rows are kept reduced against all earlier pivots.
class IncrementalBasis {
   public:
    explicit IncrementalBasis(size_t n_bits = 0) : n_words_((n_bits + 63) / 64) {
    }

    /// Returns true when `v` was independent of the current span.
    bool insert(BitRow v) {
        reduce(v);
        size_t p = lowest_bit(v);
        if (p == SIZE_MAX) {
            return false;
        }
        rows_.push_back(std::move(v));
        pivots_.push_back(p);
        return true;
    }

    bool contains(BitRow v) const {
        reduce(v);
        return is_zero(v);
    }

    void reduce(BitRow &v) const {
        for (size_t i = 0; i < rows_.size(); i++) {
            if (bit_get(v, pivots_[i])) {
                bit_xor(v, rows_[i]);
            }
        }
    }

    size_t rank() const {
        return rows_.size();
    }
    size_t n_words() const {
        return n_words_;
    }

   private:
    size_t n_words_;
    std::vector<BitRow> rows_;
    std::vector<size_t> pivots_;
};

/// Rank of a set of rows packed into single 64-bit words.
inline size_t rank_u64(std::vector<uint64_t> rows) {
    size_t rank = 0;
    for (size_t i = 0; i < rows.size(); i++) {
        uint64_t v = rows[i];
        if (!v) {
            continue;
        }
        uint64_t pivot = v & -v;
        rank++;
        for (size_t j = i + 1; j < rows.size(); j++) {
            if (rows[j] & pivot) {
                rows[j] ^= v;
            }
        }
    }
    return rank;
}

/// Rank of arbitrary-width rows.
inline size_t rank_rows(const std::vector<BitRow> &rows) {
    if (rows.empty()) {
        return 0;
    }
    IncrementalBasis basis(rows[0].size() * 64);
    for (const BitRow &r : rows) {
        basis.insert(r);
    }
    return basis.rank();
}

}  // namespace lrsd

#endif
