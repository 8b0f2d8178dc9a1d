#include "bcgc/experiment.hpp"

int main(int argc, char** argv) { return bcgc::run_cli(argc, argv); }
