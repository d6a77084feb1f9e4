#include <cstdio>
int main() { std::puts("afcmem: not built yet"); return 1; }
