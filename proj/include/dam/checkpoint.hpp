#pragma once

#include <string>

#include "dam/classifier.hpp"

namespace dam {

// Binary checkpoint, magic "DAM1", little-endian:
//   u32 version, u32 kind, u32 n, u32 K, u32 N, u32 N_c, f64 beta, u32 m,
// then K*(N+N_c) weights as f64, row-major (memory-major, visible block
// before the classification block).
struct Checkpoint {
  ClassifierModel<double> model;
  int loss_power = 1;
};

void save_checkpoint(const std::string& path, const ClassifierModel<double>& model,
                     int loss_power);
Checkpoint load_checkpoint(const std::string& path);

// Optional flat CSV dump of the weight matrix, one memory per row.
void export_weights_csv(const std::string& path, const ClassifierModel<double>& model);

}  // namespace dam
