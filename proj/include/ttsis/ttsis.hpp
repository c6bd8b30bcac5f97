#pragma once

#include "ttsis/cp_operator.hpp"
#include "ttsis/error.hpp"
#include "ttsis/forward.hpp"
#include "ttsis/generator.hpp"
#include "ttsis/gillespie.hpp"
#include "ttsis/inference.hpp"
#include "ttsis/likelihood.hpp"
#include "ttsis/network.hpp"
#include "ttsis/observations.hpp"
#include "ttsis/parallel.hpp"
#include "ttsis/random.hpp"
#include "ttsis/state.hpp"
#include "ttsis/tensor_train.hpp"
