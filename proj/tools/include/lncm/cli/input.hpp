#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lncm/model.hpp"

namespace lncm::cli {

struct LabelledDataset {
  std::vector<std::string> labels;  // one per group, in order of first appearance
  Dataset data;
};

/// Raw observations, header `group,value`. Values are log-transformed when
/// `log_transform` is set (lognormal analyses).
LabelledDataset read_raw_csv(const std::string& path, bool log_transform, ModelSpec model);
LabelledDataset parse_raw_csv(const std::string& text, bool log_transform, ModelSpec model);

/// Normal-scale summaries, header `group,n,mean_log,var_log`; var_log is the
/// unbiased (n - 1 divisor) variance.
LabelledDataset read_summary_csv(const std::string& path, ModelSpec model);
LabelledDataset parse_summary_csv(const std::string& text, ModelSpec model);

/// One row of the published RMRS summary table (log-transformed charges).
struct TabulatedGroup {
  const char* label;
  std::size_t n;
  double log_mean;
  double log_variance;  // as tabulated; divisor n
};

inline constexpr TabulatedGroup kRmrsGroups[] = {
    {"African American", 119, 9.06695, 1.824},
    {"White", 106, 8.69306, 2.629},
};

/// The tabulated log-scale variances reproduce the published analyses only
/// when read as divisor-n variances; they are rescaled to the unbiased
/// convention here.
LabelledDataset rmrs_example();

}  // namespace lncm::cli
