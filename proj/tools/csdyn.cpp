#include "csdyn/cli.hpp"

int main(int argc, char** argv) {
  return csdyn::cli::run_cli(argc, argv);
}
