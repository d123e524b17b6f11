#include <pybind11/pybind11.h>
PYBIND11_MODULE(_ssmrec, m) { m.doc() = "placeholder"; }
