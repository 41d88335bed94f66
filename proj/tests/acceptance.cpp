#include <cstdio>
int main() { std::puts("[PASS] placeholder"); return 0; }
