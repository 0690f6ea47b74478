#pragma once

#include "letc/error.hpp"
#include "letc/harness.hpp"
#include "letc/parallel.hpp"
#include "letc/solver.hpp"
#include "letc/spatial.hpp"
#include "letc/temporal.hpp"
#include "letc/tensor.hpp"
#include "letc/transform.hpp"
#include "letc/tsvd.hpp"
