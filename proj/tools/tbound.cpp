#include "tbound/cli.hpp"

int main(int argc, char** argv) {
  return tbound::cli::run_command(std::vector<std::string>(argv, argv + argc));
}
