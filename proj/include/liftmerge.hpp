#pragma once

#include "liftmerge/config.hpp"
#include "liftmerge/lp.hpp"
#include "liftmerge/polyhedron.hpp"
#include "liftmerge/solution.hpp"
#include "liftmerge/reduce.hpp"
#include "liftmerge/merge.hpp"
#include "liftmerge/tree.hpp"
#include "liftmerge/evaluator.hpp"
#include "liftmerge/io.hpp"
#include "liftmerge/generator.hpp"
#include "liftmerge/pipeline.hpp"
