#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace histscan {

/// Splits on '\n'. A single trailing newline does not produce an empty
/// final line.
std::vector<std::string_view> split_lines(std::string_view content);

std::vector<std::string_view> split_tsv(std::string_view line);

/// Joins fields with tabs. Throws InvalidRequest if a field holds a tab or newline.
std::string join_tsv(std::initializer_list<std::string_view> fields);
std::string join_tsv(const std::vector<std::string>& fields);

}  // namespace histscan
