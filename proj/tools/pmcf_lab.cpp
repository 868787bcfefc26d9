#include <iostream>

#include <pmcf/cli.hpp>

int main(int argc, char** argv)
{
  return pmcf::cli::run(argc, argv, std::cout, std::cerr);
}
