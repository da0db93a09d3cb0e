/**
 * @file qinv_cli.cpp
 * @brief Command-line interface (placeholder while the library is built up).
 */

#include <cstdio>

int main() {
    std::puts("qinv: CLI not yet wired");
    return 0;
}
