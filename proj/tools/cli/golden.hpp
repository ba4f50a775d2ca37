#pragma once

// Fixed wire-format corpus. The files under tests/golden were produced by
// `bisched golden` and are compared byte for byte by the regression tests.

#include "bisched/codec.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace bisched::cli {

struct GoldenFrame {
    std::string name;
    FrameKind kind = FrameKind::PlainMsdu;
    std::size_t units = 0;  // MSDUs for plain/amsdu, MPDUs for ampdu
    std::vector<std::uint8_t> bytes;
};

std::vector<GoldenFrame> golden_corpus();

// Writes every frame as <name> plus a MANIFEST of "name kind units bytes" lines.
void write_golden(const std::filesystem::path& dir);

}  // namespace bisched::cli
