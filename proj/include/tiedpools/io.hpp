#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tiedpools/comparison_data.hpp"
#include "tiedpools/pool_inference.hpp"

namespace tiedpools {

// Match table with header player,opponent,wins,losses,draws[,handicap] (any
// column order). Fields may be double-quoted; "" inside quotes is a quote.
// Blank lines and lines starting with '#' are skipped.
std::vector<MatchRecord> parse_match_csv(std::string_view text, const std::string& source = "<input>");

// {"players": [...], "wins": [[...]], "draws": [[...]]}
ComparisonData parse_matrix_json(std::string_view text, const std::string& source = "<input>");

// {"players": [a, b, c], "round_wins": [x, y, z]}
PoolCounts parse_pool_json(std::string_view text, const std::string& source = "<input>");

std::string read_file(const std::string& path);

// .csv as a match table, .json as matrix JSON.
ComparisonData load_comparisons(const std::string& path);
PoolCounts load_pool_counts(const std::string& path);

}  // namespace tiedpools
