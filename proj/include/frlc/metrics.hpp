#pragma once

// Clustering agreement scores.

#include <vector>

namespace frlc {

double adjusted_rand_index(const std::vector<int>& truth, const std::vector<int>& pred);

// Adjusted mutual information with arithmetic-mean normalisation.
double adjusted_mutual_info(const std::vector<int>& truth, const std::vector<int>& pred);

}  // namespace frlc
