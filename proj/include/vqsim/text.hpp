#ifndef VQSIM_TEXT_HPP_
#define VQSIM_TEXT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace vqsim {

// Shortest decimal form that parses back to the same double (to_chars).
std::string format_double(double value);

double parse_double(std::string_view text);    // throws on trailing junk
long long parse_int(std::string_view text);

// Whitespace-separated tokens.
std::vector<std::string_view> split_tokens(std::string_view line);

std::string to_lower(std::string_view text);

}  // namespace vqsim

#endif  // VQSIM_TEXT_HPP_
