#include "core/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include <unistd.h>

namespace bdbm {

namespace {

// Host is assumed little-endian (x86-64 / aarch64-le); raw memcpy of the
// scalar types below therefore matches the documented on-disk layout.
static_assert(sizeof(double) == 8);

void put_u8(std::string& out, uint8_t v) { out.push_back(char(v)); }
void put_u32(std::string& out, uint32_t v) { out.append(reinterpret_cast<const char*>(&v), 4); }
void put_f64(std::string& out, double v) { out.append(reinterpret_cast<const char*>(&v), 8); }

struct Reader {
  const std::string& buf;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > buf.size())
      throw TruncationError(cat("checkpoint truncated: need ", n, " bytes at offset ", pos,
                                ", file has ", buf.size()));
  }
  uint8_t u8() {
    need(1);
    return uint8_t(buf[pos++]);
  }
  uint32_t u32() {
    need(4);
    uint32_t v;
    std::memcpy(&v, buf.data() + pos, 4);
    pos += 4;
    return v;
  }
  double f64() {
    need(8);
    double v;
    std::memcpy(&v, buf.data() + pos, 8);
    pos += 8;
    return v;
  }
  void f64_block(double* dst, size_t n) {
    need(8 * n);
    std::memcpy(dst, buf.data() + pos, 8 * n);
    pos += 8 * n;
  }
};

}  // namespace

void atomic_write_file(const std::string& path, const std::string& bytes) {
  std::string tmp = cat(path, ".tmp.", ::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(cat("cannot open '", tmp, "' for writing"));
    f.write(bytes.data(), std::streamsize(bytes.size()));
    f.flush();
    if (!f) {
      std::remove(tmp.c_str());
      throw IoError(cat("write failed for '", tmp, "'"));
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError(cat("cannot rename '", tmp, "' to '", path, "'"));
  }
}

void save_checkpoint(const NetParams& params, const BridgeSchedule& sched,
                     const TransitionVariancePolicy& policy, const std::string& path) {
  if (sched.kind() != ScheduleKind::brownian)
    throw ConfigError("checkpoint: custom-table schedules are not representable in the file format");
  std::string out;
  out.append("BDBM", 4);
  put_u32(out, 1);
  put_u8(out, uint8_t(params.param));
  put_u8(out, params.mask_channels ? 1 : 0);
  put_u32(out, params.d);
  put_u32(out, params.time_emb_dim);
  put_u8(out, uint8_t(sched.kind()));
  put_f64(out, sched.k());
  put_f64(out, sched.T());
  put_u32(out, sched.steps());
  put_u8(out, uint8_t(policy.variant));
  put_f64(out, policy.eta);
  put_u32(out, uint32_t(params.layers.size()));
  for (const auto& l : params.layers) {
    put_u32(out, l.rows);
    put_u32(out, l.cols);
    out.append(reinterpret_cast<const char*>(l.W.data()), 8 * l.W.size());
    out.append(reinterpret_cast<const char*>(l.b.data()), 8 * l.b.size());
  }
  atomic_write_file(path, out);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(cat("cannot open checkpoint '", path, "'"));
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Reader r{buf};

  r.need(4);
  if (buf.compare(0, 4, "BDBM") != 0)
    throw BadMagicError(cat("'", path, "' is not a checkpoint (bad magic)"));
  r.pos = 4;
  uint32_t version = r.u32();
  if (version != 1) throw VersionError(cat("unsupported checkpoint version ", version));

  Checkpoint ck;
  uint8_t param = r.u8();
  if (param > 2) throw FormatError(cat("invalid parameterization byte ", int(param)));
  ck.params.param = Parameterization(param);
  uint8_t maskflag = r.u8();
  if (maskflag > 1) throw FormatError(cat("invalid mask-channel flag ", int(maskflag)));
  ck.params.mask_channels = maskflag == 1;
  ck.params.d = r.u32();
  ck.params.time_emb_dim = r.u32();
  if (ck.params.d == 0) throw FormatError("checkpoint: d = 0");

  uint8_t kind = r.u8();
  if (kind != uint8_t(ScheduleKind::brownian))
    throw FormatError(cat("checkpoint: unsupported schedule kind ", int(kind)));
  double k = r.f64();
  double T = r.f64();
  uint32_t steps = r.u32();
  ck.sched = BridgeSchedule::brownian(k, T, steps == 0 ? TimeMode::continuous : TimeMode::discrete,
                                      steps);
  uint8_t variant = r.u8();
  if (variant > 2) throw FormatError(cat("checkpoint: invalid policy variant ", int(variant)));
  ck.policy.variant = DeltaVariant(variant);
  ck.policy.eta = r.f64();

  uint32_t nlayers = r.u32();
  if (nlayers == 0 || nlayers > 64) throw FormatError(cat("checkpoint: layer count ", nlayers));
  for (uint32_t i = 0; i < nlayers; ++i) {
    Layer l;
    l.rows = r.u32();
    l.cols = r.u32();
    if (l.rows == 0 || l.cols == 0 || size_t(l.rows) * l.cols > (64u << 20))
      throw FormatError(cat("checkpoint: implausible layer shape ", l.rows, "x", l.cols));
    l.W.resize(size_t(l.rows) * l.cols);
    l.b.resize(l.rows);
    r.f64_block(l.W.data(), l.W.size());
    r.f64_block(l.b.data(), l.b.size());
    ck.params.layers.push_back(std::move(l));
  }
  if (r.pos != buf.size())
    throw FormatError(cat("checkpoint: ", buf.size() - r.pos, " trailing bytes"));

  if (ck.params.layers.front().cols != ck.params.input_dim())
    throw FormatError(cat("checkpoint: first layer expects ", ck.params.layers.front().cols,
                          " inputs but the header implies ", ck.params.input_dim()));
  if (ck.params.layers.back().rows != ck.params.output_dim())
    throw FormatError(cat("checkpoint: last layer emits ", ck.params.layers.back().rows,
                          " outputs but the header implies ", ck.params.output_dim()));
  return ck;
}

uint64_t fnv1a64(const void* data, size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  uint64_t h = 14695981039346656037ULL;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

uint64_t file_digest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(cat("cannot open '", path, "' for digest"));
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return fnv1a64(buf.data(), buf.size());
}

std::string digest_hex(uint64_t digest) {
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(digest));
  return out;
}

}  // namespace bdbm
