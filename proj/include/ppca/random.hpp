#ifndef PPCA_RANDOM_HPP
#define PPCA_RANDOM_HPP

#include <array>
#include <cstdint>
#include <limits>

namespace ppca {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The key is the 64-bit master seed; the 128-bit counter holds the stream
/// index in its high half and the block number in its low half. A stream is
/// therefore a pure function of (master_seed, stream_index): replicate k of an
/// experiment draws the same numbers no matter which thread runs it.
///
/// Satisfies UniformRandomBitGenerator, so std:: distributions accept it.
class RngStream {
public:
    using result_type = std::uint32_t;

    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : seed_(master_seed), index_(stream_index) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (pos_ == 4) {
            buffer_ = block(block_++);
            pos_ = 0;
        }
        return buffer_[pos_++];
    }

    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t stream_index() const { return index_; }

    /// Independent child stream, e.g. for a sub-task of one replicate.
    RngStream substream(std::uint64_t tag) const {
        return RngStream(seed_ ^ (0x9E3779B97F4A7C15ULL * (tag + 1)), index_);
    }

    /// Output block n of this stream (four words), independent of position.
    std::array<std::uint32_t, 4> block(std::uint64_t n) const {
        std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(n),
                                         static_cast<std::uint32_t>(n >> 32),
                                         static_cast<std::uint32_t>(index_),
                                         static_cast<std::uint32_t>(index_ >> 32)};
        std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
        std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0,
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1,
                   static_cast<std::uint32_t>(p0)};
            k0 += 0x9E3779B9;
            k1 += 0xBB67AE85;
        }
        return ctr;
    }

private:
    std::uint64_t seed_;
    std::uint64_t index_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int pos_ = 4;
};

}  // namespace ppca

#endif  // PPCA_RANDOM_HPP
