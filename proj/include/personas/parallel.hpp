#pragma once

namespace personas {

// Thin wrappers so the library builds with or without OpenMP.
void set_thread_count(int threads);
int thread_count();

}  // namespace personas
