#include "hankelpgd/experiments.hpp"

int main(int argc, char** argv) { return hankelpgd::cli_main(argc, argv); }
