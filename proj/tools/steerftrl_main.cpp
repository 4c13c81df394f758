#include "steerftrl/cli.hpp"

int main(int argc, char** argv) { return steerftrl::run_cli(argc, argv); }
