#include "dam/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace dam {

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'D', 'A', 'M', '1'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <class T>
T get(std::istream& in, const char* what) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof value))
    throw std::runtime_error(std::string("checkpoint: truncated while reading ") + what);
  return value;
}

}  // namespace

void save_checkpoint(const std::string& path, const ClassifierModel<double>& model,
                     int loss_power) {
  if (!model.shape_ok()) throw std::invalid_argument("save_checkpoint: bad model");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, model.energy.kind == EnergyKind::Polynomial ? 0u : 1u);
  put<std::uint32_t>(out, std::uint32_t(model.energy.power));
  put<std::uint32_t>(out, std::uint32_t(model.memory_count()));
  put<std::uint32_t>(out, std::uint32_t(model.visible));
  put<std::uint32_t>(out, std::uint32_t(model.classes));
  put<double>(out, double(model.beta));
  put<std::uint32_t>(out, std::uint32_t(loss_power));
  for (int mu = 0; mu < model.memory_count(); ++mu)
    for (int j = 0; j < model.units(); ++j) put<double>(out, model.weights(mu, j));
  if (!out) throw std::runtime_error("save_checkpoint: short write to " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("load_checkpoint: bad magic (not a DAM1 file)");
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kVersion)
    throw std::runtime_error("load_checkpoint: unsupported version " +
                             std::to_string(version));
  const auto kind = get<std::uint32_t>(in, "kind");
  if (kind > 1) throw std::runtime_error("load_checkpoint: bad energy kind");
  const auto power = get<std::uint32_t>(in, "power");
  const auto memory_count = get<std::uint32_t>(in, "K");
  const auto visible = get<std::uint32_t>(in, "N");
  const auto classes = get<std::uint32_t>(in, "N_c");
  const double beta = get<double>(in, "beta");
  const auto loss_power = get<std::uint32_t>(in, "m");

  Checkpoint ckpt;
  ckpt.loss_power = int(loss_power);
  ckpt.model.visible = int(visible);
  ckpt.model.classes = int(classes);
  ckpt.model.energy = {int(power), kind == 0 ? EnergyKind::Polynomial
                                             : EnergyKind::RectifiedPolynomial};
  ckpt.model.beta = beta;
  ckpt.model.weights.resize(memory_count, visible + classes);
  for (std::uint32_t mu = 0; mu < memory_count; ++mu)
    for (std::uint32_t j = 0; j < visible + classes; ++j)
      ckpt.model.weights(mu, j) = get<double>(in, "weights");
  if (!ckpt.model.shape_ok())
    throw std::runtime_error("load_checkpoint: inconsistent header in " + path);
  return ckpt;
}

void export_weights_csv(const std::string& path, const ClassifierModel<double>& model) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("export_weights_csv: cannot open " + path);
  char buffer[64];
  for (int mu = 0; mu < model.memory_count(); ++mu) {
    for (int j = 0; j < model.units(); ++j) {
      std::snprintf(buffer, sizeof buffer, "%.17g", model.weights(mu, j));
      out << (j ? "," : "") << buffer;
    }
    out << '\n';
  }
}

}  // namespace dam
