#include "bisched/phy.hpp"

#include "bisched/block_ack.hpp"
#include "bisched/error.hpp"

#include <cmath>

namespace bisched {

void PhyProfile::validate() const {
    if (!(data_rate_mbps > 0.0) || data_rate_mbps > kMaxDataRateMbps) {
        throw ValidationError("phy.data_rate_mbps", "must be in (0, 600]");
    }
    if (!(basic_rate_mbps > 0.0) || basic_rate_mbps > kMaxDataRateMbps) {
        throw ValidationError("phy.basic_rate_mbps", "must be in (0, 600]");
    }
    if (preamble < 0) throw ValidationError("phy.preamble_us", "must be >= 0");
    if (sifs < 0) throw ValidationError("phy.sifs_us", "must be >= 0");
    if (difs < 0) throw ValidationError("phy.difs_us", "must be >= 0");
    if (!(ber >= 0.0 && ber <= 1.0)) throw ValidationError("phy.ber", "out of range [0, 1]");
}

TimeUs tx_duration(std::uint64_t bytes, double rate_mbps, TimeUs preamble) {
    const double bits = 8.0 * static_cast<double>(bytes);
    return preamble + static_cast<TimeUs>(std::ceil(bits / rate_mbps));
}

TimeUs block_ack_duration(const PhyProfile& phy) {
    return tx_duration(kBlockAckFrameBytes, phy.basic_rate_mbps, phy.preamble);
}

TimeUs exchange_airtime(std::uint64_t psdu_bytes, const PhyProfile& phy) {
    return phy.difs + tx_duration(psdu_bytes, phy) + phy.sifs + block_ack_duration(phy);
}

double unit_error_prob(std::uint64_t len_bytes, double ber) {
    if (len_bytes == 0 || ber <= 0.0) return 0.0;
    if (ber >= 1.0) return 1.0;
    return -std::expm1(8.0 * static_cast<double>(len_bytes) * std::log1p(-ber));
}

std::vector<bool> apply_errors(const TxDescriptor& desc, const PhyProfile& phy, Rng& rng) {
    std::vector<bool> corrupted(desc.mpdus.size(), false);
    if (phy.ber <= 0.0 || desc.mpdus.empty()) return corrupted;

    if (desc.kind != FrameKind::Ampdu || phy.single_checksum) {
        const bool hit = rng.bernoulli(unit_error_prob(desc.total_bytes, phy.ber));
        corrupted.assign(desc.mpdus.size(), hit);
        return corrupted;
    }
    for (std::size_t i = 0; i < desc.mpdus.size(); ++i) {
        corrupted[i] = rng.bernoulli(unit_error_prob(kDelimiterLen + desc.mpdus[i].total_len(), phy.ber));
    }
    return corrupted;
}

}  // namespace bisched
