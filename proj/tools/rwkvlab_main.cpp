// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include <iostream>
#include <string>
#include <vector>

#include "rwkvlab/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return rwkvlab::run_cli(args, std::cout, std::cerr);
}
