#include "rocc/params.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

namespace rocc {

int ParamSet::add(std::string name, Tensor init) {
  if (index_of(name) >= 0)
    throw StructuralError("ParamSet: duplicate entry '" + name + "'");
  Entry e;
  e.name = std::move(name);
  e.grad = Tensor(init.shape());
  e.adam_m = Tensor(init.shape());
  e.adam_v = Tensor(init.shape());
  e.value = std::move(init);
  entries_.push_back(std::move(e));
  return static_cast<int>(entries_.size()) - 1;
}

int ParamSet::index_of(const std::string& name) const {
  for (size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].name == name) return static_cast<int>(i);
  return -1;
}

ParamSet::Entry& ParamSet::entry(const std::string& name) {
  const int i = index_of(name);
  if (i < 0) throw StructuralError("ParamSet: no entry '" + name + "'");
  return entries_[static_cast<size_t>(i)];
}

const ParamSet::Entry& ParamSet::entry(const std::string& name) const {
  const int i = index_of(name);
  if (i < 0) throw StructuralError("ParamSet: no entry '" + name + "'");
  return entries_[static_cast<size_t>(i)];
}

int64_t ParamSet::num_values() const {
  int64_t n = 0;
  for (const Entry& e : entries_) n += e.value.numel();
  return n;
}

void ParamSet::zero_grads() {
  for (Entry& e : entries_) e.grad.fill(0.0);
}

double ParamSet::grad_abs_max() const {
  double m = 0.0;
  for (const Entry& e : entries_)
    for (int64_t i = 0; i < e.grad.numel(); ++i)
      m = std::max(m, std::fabs(e.grad[i]));
  return m;
}

ParamSet ParamSet::clone_values() const {
  ParamSet out;
  for (const Entry& e : entries_) out.add(e.name, e.value);
  return out;
}

void ParamSet::copy_values_from(const ParamSet& other) {
  if (other.size() != size())
    throw StructuralError("ParamSet::copy_values_from: entry count mismatch");
  for (int i = 0; i < size(); ++i) {
    Entry& dst = entries_[static_cast<size_t>(i)];
    const Entry& src = other.entries_[static_cast<size_t>(i)];
    if (dst.name != src.name || !dst.value.same_shape(src.value))
      throw StructuralError("ParamSet::copy_values_from: entry mismatch at '" +
                            dst.name + "'");
    dst.value = src.value;
  }
}

void adam_step(ParamSet& params, double lr) {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;

  for (const ParamSet::Entry& e : params.entries_)
    if (!e.grad.all_finite())
      throw NumericError("adam_step: non-finite gradient in '" + e.name + "'");

  const int64_t t = ++params.step_count_;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));

  for (ParamSet::Entry& e : params.entries_) {
    for (int64_t i = 0; i < e.value.numel(); ++i) {
      const double g = e.grad[i];
      e.adam_m[i] = kBeta1 * e.adam_m[i] + (1.0 - kBeta1) * g;
      e.adam_v[i] = kBeta2 * e.adam_v[i] + (1.0 - kBeta2) * g * g;
      const double mhat = e.adam_m[i] / bc1;
      const double vhat = e.adam_v[i] / bc2;
      e.value[i] -= lr * mhat / (std::sqrt(vhat) + kEps);
    }
    e.grad.fill(0.0);
  }
}

void polyak_update(ParamSet& target, const ParamSet& online, double rho) {
  if (target.size() != online.size())
    throw StructuralError("polyak_update: entry count mismatch");
  for (int i = 0; i < target.size(); ++i) {
    ParamSet::Entry& t = target.entry(i);
    const ParamSet::Entry& o = online.entry(i);
    if (t.name != o.name || !t.value.same_shape(o.value))
      throw StructuralError("polyak_update: entry mismatch at '" + t.name + "'");
    for (int64_t k = 0; k < t.value.numel(); ++k)
      t.value[k] = rho * t.value[k] + (1.0 - rho) * o.value[k];
  }
}

namespace {

constexpr char kMagic[5] = {'R', 'O', 'C', 'P', '1'};

void write_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw StructuralError("param file: truncated u32");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void write_f64(std::ostream& os, double v) {
  uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw StructuralError("param file: truncated f64");
  uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace

void save_params(std::ostream& os, const ParamSet& params,
                 const std::string& name_prefix) {
  os.write(kMagic, 5);
  for (int i = 0; i < params.size(); ++i) {
    const ParamSet::Entry& e = params.entry(i);
    const std::string name = name_prefix + e.name;
    write_u32(os, static_cast<uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(os, static_cast<uint32_t>(e.value.rank()));
    for (int a = 0; a < e.value.rank(); ++a)
      write_u32(os, static_cast<uint32_t>(e.value.extent(a)));
    for (int64_t k = 0; k < e.value.numel(); ++k) write_f64(os, e.value[k]);
  }
}

std::vector<LoadedEntry> read_param_file(std::istream& is) {
  char magic[5];
  is.read(magic, 5);
  if (!is || std::memcmp(magic, kMagic, 5) != 0)
    throw StructuralError("param file: bad magic");
  std::vector<LoadedEntry> out;
  while (true) {
    is.peek();
    if (is.eof()) break;
    const uint32_t name_len = read_u32(is);
    if (name_len > 4096) throw StructuralError("param file: implausible name length");
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    if (!is) throw StructuralError("param file: truncated name");
    const uint32_t rank = read_u32(is);
    if (rank > 8) throw StructuralError("param file: implausible rank");
    Shape shape;
    int64_t numel = 1;
    for (uint32_t a = 0; a < rank; ++a) {
      const uint32_t ext = read_u32(is);
      if (ext == 0) throw StructuralError("param file: zero extent");
      shape.push_back(static_cast<int>(ext));
      numel *= ext;
    }
    std::vector<double> data(static_cast<size_t>(numel));
    for (int64_t k = 0; k < numel; ++k) data[static_cast<size_t>(k)] = read_f64(is);
    out.push_back(LoadedEntry{std::move(name), Tensor(std::move(shape), std::move(data))});
  }
  return out;
}

void assign_params(ParamSet& params, const std::vector<LoadedEntry>& loaded,
                   const std::string& name_prefix) {
  int assigned = 0;
  for (const LoadedEntry& le : loaded) {
    if (le.name.rfind(name_prefix, 0) != 0) continue;
    const std::string local = le.name.substr(name_prefix.size());
    const int idx = params.index_of(local);
    if (idx < 0) continue;
    ParamSet::Entry& e = params.entry(idx);
    if (!e.value.same_shape(le.value))
      throw StructuralError("param file: shape mismatch for '" + le.name + "'");
    e.value = le.value;
    ++assigned;
  }
  if (assigned != params.size())
    throw StructuralError("param file: missing entries under prefix '" +
                          name_prefix + "'");
}

}  // namespace rocc
