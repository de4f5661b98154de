#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "lovesim/error.hpp"
#include "lovesim/report.hpp"

using namespace lovesim;

namespace {

// Ten folds with accuracy tp/(tp+fp+fn+tn) = (k + tn)/10 for a fixed k.
CvResult fake(AblationCondition c, std::size_t correct) {
  CvResult r;
  r.condition = c;
  for (std::size_t i = 0; i < 10; ++i) {
    FoldResult f;
    f.fold = i;
    const std::size_t jitter = i % 2;
    const std::size_t right = std::min<std::size_t>(10, correct + jitter);
    f.metrics = metrics_from_counts(right / 2 + right % 2, (10 - right) / 2, (10 - right + 1) / 2,
                                    right / 2);
    f.test_examples = 10;
    r.folds.push_back(f);
  }
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("four rows in table order with bold maxima and significance marks") {
  const std::vector<CvResult> results = {fake(AblationCondition::PD, 9), fake(AblationCondition::None_, 5),
                                         fake(AblationCondition::D_only, 5),
                                         fake(AblationCondition::P_only, 6)};
  const auto rep = render_ablation_report(results, 1);
  const auto md = lines(rep.markdown);
  REQUIRE(md.size() > 6);
  CHECK(md[0] == "| Features assigned to target utt. | Acc. | Precision | Recall | F1 |");
  CHECK(md[2].rfind("| (a) Only D", 0) == 0);
  CHECK(md[3].rfind("| (b) Only P", 0) == 0);
  CHECK(md[4].rfind("| (c) P+D", 0) == 0);
  CHECK(md[5].rfind("| (d) None", 0) == 0);

  const auto acc_pd = format_mean_std(results[0].summary().accuracy);
  CHECK(md[4].find("**" + acc_pd + "**<sup>a,b,d</sup>") != std::string::npos);
  CHECK(md[2].find("**") == std::string::npos);
  CHECK(md[2].find("<sup>") == std::string::npos);

  const auto csv = lines(rep.csv);
  REQUIRE(csv.size() == 5);
  CHECK(csv[0] ==
        "row,condition,folds,accuracy_mean,accuracy_std,precision_mean,precision_std,recall_mean,"
        "recall_std,f1_mean,f1_std,accuracy_sig,precision_sig,recall_sig,f1_sig");
  CHECK(csv[3].rfind("c,pd,10,", 0) == 0);
  CHECK(csv[3].find(",abd") != std::string::npos);
}

TEST_CASE("ties in the column maximum are all bold") {
  const std::vector<CvResult> results = {fake(AblationCondition::PD, 7), fake(AblationCondition::D_only, 7)};
  const auto md = lines(render_ablation_report(results).markdown);
  CHECK(md[2].find("**") != std::string::npos);
  CHECK(md[3].find("**") != std::string::npos);
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(render_ablation_report({}), ValidationError);
  const std::vector<CvResult> dup = {fake(AblationCondition::PD, 7), fake(AblationCondition::PD, 8)};
  CHECK_THROWS_AS(render_ablation_report(dup), ValidationError);
  auto one = fake(AblationCondition::PD, 7);
  one.folds.resize(1);
  const std::vector<CvResult> short_run = {one};
  CHECK_THROWS_AS(render_ablation_report(short_run), ValidationError);
}

TEST_CASE("results round trip through json") {
  const std::vector<CvResult> results = {fake(AblationCondition::PD, 9), fake(AblationCondition::D_only, 5)};
  const auto path = std::filesystem::temp_directory_path() / "lovesim_report_test.json";
  write_ablation_results(path, results);
  const auto back = read_ablation_results(path);
  std::filesystem::remove(path);
  REQUIRE(back.size() == 2);
  CHECK(back[1].condition == AblationCondition::D_only);
  CHECK(back[0].per_fold_metrics() == results[0].per_fold_metrics());
  CHECK(render_ablation_report(back).markdown == render_ablation_report(results).markdown);
}

}
