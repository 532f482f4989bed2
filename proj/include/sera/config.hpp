#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sera/attack.hpp"
#include "sera/encoders.hpp"
#include "sera/training.hpp"

namespace sera {

enum class GenKind { ER, SBM, BUNDLE };
enum class AttackTarget { AUTO, FULL_GRAPH, TEST_SUBGRAPH };

const char* gen_name(GenKind g);
const char* target_name(AttackTarget t);

// One sweep description: the grid axes are lists, everything else is a
// scalar. Loaded from a flat key = value file ('#' comments, [a, b] lists).
struct ExperimentConfig {
  GenKind gen = GenKind::ER;
  std::vector<uint32_t> n_list;  // synthetic generators only
  uint32_t sbm_k = 2;
  std::string p_spec = "auto";  // edge probability, or "auto" for ln(n)/n
  double sbm_q = 0.0;           // cross-block probability
  std::string bundle_path;      // gen = bundle only

  std::vector<uint32_t> d_list{64};
  std::vector<uint32_t> l_list{1};
  std::vector<ArchKind> arch_list{ArchKind::LINEAR};
  std::vector<double> sigma_list{0.0};

  InitScheme init = InitScheme::IDENTITY;
  EncodeMode mode = EncodeMode::STANDARD;
  WeightScheme scheme = WeightScheme::UNCONSTRAINED;
  SimilarityKind sim = SimilarityKind::COS;
  bool trained = false;
  uint32_t epochs = 1000;
  double lr = 1e-3;
  AttackTarget target = AttackTarget::AUTO;

  uint32_t seeds = 5;
  uint64_t master_seed = 1;
  std::string out = "sweep.csv";
  bool fs_baseline = true;

  double resolve_p(uint32_t n) const;  // "auto" -> ln(n)/n
};

ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

}  // namespace sera
