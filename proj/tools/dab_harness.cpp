// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "dab/harness/cli.hpp"

int main(int argc, char** argv) { return dab::harness::run(argc, argv, std::cout, std::cerr); }
