#pragma once

#include "core/net.hpp"
#include "core/schedule.hpp"

namespace bdbm {

// Three failure modes callers need to tell apart.
struct BadMagicError : FormatError {
  explicit BadMagicError(const std::string& m) : FormatError(m) {}
};
struct VersionError : FormatError {
  explicit VersionError(const std::string& m) : FormatError(m) {}
};
struct TruncationError : FormatError {
  explicit TruncationError(const std::string& m) : FormatError(m) {}
};

struct Checkpoint {
  NetParams params;
  BridgeSchedule sched = BridgeSchedule::brownian(2.0, 1.0);
  TransitionVariancePolicy policy;
};

// Binary little-endian layout:
//   magic "BDBM" | version u32=1 | parameterization u8 | mask-channel flag u8
//   | d u32 | time_emb_dim u32
//   | schedule: kind u8, k f64, T f64, steps u32 (0 = continuous),
//               policy variant u8, eta f64
//   | layer count u32 | per layer: rows u32, cols u32, W f64 row-major, b f64
// Written to a temp file and renamed, so partial checkpoints never appear.
void save_checkpoint(const NetParams& params, const BridgeSchedule& sched,
                     const TransitionVariancePolicy& policy, const std::string& path);

Checkpoint load_checkpoint(const std::string& path);

uint64_t fnv1a64(const void* data, size_t n);
uint64_t file_digest(const std::string& path);
std::string digest_hex(uint64_t digest);

// Shared by every writer: dump bytes to <path>.tmp.<pid> then rename.
void atomic_write_file(const std::string& path, const std::string& bytes);

}  // namespace bdbm
