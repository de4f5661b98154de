#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lovesim/ablation.hpp"

namespace lovesim {

void to_json(nlohmann::json& j, const Metrics& m);
void from_json(const nlohmann::json& j, Metrics& m);
void to_json(nlohmann::json& j, const FoldResult& f);
void from_json(const nlohmann::json& j, FoldResult& f);

// Per-fold results without the models.
void to_json(nlohmann::json& j, const CvResult& r);
void from_json(const nlohmann::json& j, CvResult& r);

std::vector<CvResult> read_ablation_results(const std::filesystem::path& path);
void write_ablation_results(const std::filesystem::path& path, std::span<const CvResult> results);

// Table letter of a condition's row: D_only a, P_only b, PD c, None d.
char row_letter(AblationCondition c);

struct AblationReport {
  std::string markdown;
  std::string csv;
};

// Rows ordered (a)-(d) with mean ± std per metric. The best mean of each
// column is bold; a row's superscript lists the rows it beats with
// permutation p < 0.05. Needs at least one result, each with two or more
// folds.
AblationReport render_ablation_report(std::span<const CvResult> results, std::uint64_t seed = 0);

}  // namespace lovesim
