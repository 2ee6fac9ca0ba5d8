#include <cstdio>

int main() {
    std::puts("lab: command-line interface under construction");
    return 1;
}
