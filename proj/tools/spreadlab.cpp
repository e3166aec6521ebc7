#include <iostream>

#include "spreadlab/cli.hpp"

int main(int argc, char** argv) {
  const auto result = spreadlab::cli::run_command(std::vector<std::string>(argv + 1, argv + argc));
  auto& stream = result.exit_code == spreadlab::cli::kInputError ? std::cerr : std::cout;
  stream << result.human_summary;
  if (!result.human_summary.empty() && result.human_summary.back() != '\n') stream << '\n';
  return result.exit_code;
}
