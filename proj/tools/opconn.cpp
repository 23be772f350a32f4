// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "opconn/cli.hpp"

int main(int argc, char **argv) {
  return opconn::cli::run(argc, argv, std::cout, std::cerr);
}
