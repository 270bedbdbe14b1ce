#pragma once

#include "spcp/bench.hpp"
#include "spcp/instance_gen.hpp"
#include "spcp/io.hpp"
#include "spcp/model.hpp"
#include "spcp/prox.hpp"
#include "spcp/rng.hpp"
#include "spcp/solvers.hpp"
#include "spcp/subproblem.hpp"
