#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace resparse::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kContractViolation = 1;
inline constexpr int kBadInput = 2;

// Runs one command line, program name excluded. Normal output goes to out,
// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 64-bit FNV-1a of a file's bytes as 16 hex digits.
std::string file_digest(const std::string& path);
std::string text_digest(const std::string& text);

}  // namespace resparse::cli
