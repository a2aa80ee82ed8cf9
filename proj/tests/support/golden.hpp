#pragma once

#include <cstdint>

// Frozen expected values, computed with the independent oracles in this directory.

// crc24 over the serialized payload of random_test_pdu(20250810, 37),
// cross-checked against the long-division oracle at test time.
inline constexpr uint32_t kGoldenCrcV1 = 0xDEADBEu;  // placeholder until first capture
