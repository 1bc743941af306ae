#include "dks/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
  return dks::run_cli(argc, argv, std::cout, std::cerr);
}
