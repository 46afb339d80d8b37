#include "extentlab/cli.hpp"

int main(int argc, char **argv)
{
    return extentlab::cli::main_entry(argc, argv);
}
