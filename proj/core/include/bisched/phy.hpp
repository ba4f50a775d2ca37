#pragma once

#include "bisched/frame_model.hpp"
#include "bisched/rng.hpp"
#include "bisched/scheduler.hpp"

#include <cstdint>
#include <vector>

namespace bisched {

// Single-link PHY abstraction. Spatial streams and channel width are folded
// into data_rate_mbps (1 Mb/s == 1 bit/us).
struct PhyProfile {
    double data_rate_mbps = 248.0;
    double basic_rate_mbps = 24.0;
    TimeUs preamble = 40;
    TimeUs sifs = 16;
    TimeUs difs = 34;
    double ber = 0.0;
    // Treat a whole A-MPDU as one checksummed unit (any bit error loses every
    // MPDU in it), the way an A-MSDU behaves.
    bool single_checksum = false;

    static constexpr double kMaxDataRateMbps = 600.0;

    // Throws ValidationError naming the offending phy.* key.
    void validate() const;
};

TimeUs tx_duration(std::uint64_t bytes, double rate_mbps, TimeUs preamble);
inline TimeUs tx_duration(std::uint64_t bytes, const PhyProfile& phy) {
    return tx_duration(bytes, phy.data_rate_mbps, phy.preamble);
}

TimeUs block_ack_duration(const PhyProfile& phy);

// DIFS + data + SIFS + BlockAck, the channel time one exchange occupies.
TimeUs exchange_airtime(std::uint64_t psdu_bytes, const PhyProfile& phy);

// Probability that at least one of 8*len_bytes bits is flipped.
double unit_error_prob(std::uint64_t len_bytes, double ber);

// Per-MPDU corruption flags, parallel to desc.mpdus.
std::vector<bool> apply_errors(const TxDescriptor& desc, const PhyProfile& phy, Rng& rng);

}  // namespace bisched
