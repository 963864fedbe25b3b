#pragma once

#include "loewner/errors.hpp"
#include "loewner/driver.hpp"
#include "loewner/flow.hpp"
#include "loewner/hitting.hpp"
#include "loewner/welding.hpp"
#include "loewner/welders.hpp"
#include "loewner/tracer.hpp"
#include "loewner/energy.hpp"
#include "loewner/identities.hpp"
#include "loewner/experiments.hpp"
