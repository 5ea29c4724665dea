#pragma once

#include "gdrop/config.hpp"
#include "gdrop/drop.hpp"
#include "gdrop/errors.hpp"
#include "gdrop/linalg.hpp"
#include "gdrop/matrix.hpp"
#include "gdrop/matrix_market.hpp"
#include "gdrop/models.hpp"
#include "gdrop/pipeline.hpp"
#include "gdrop/report.hpp"
#include "gdrop/scalar_function.hpp"
#include "gdrop/structured_system.hpp"
#include "gdrop/sylvester.hpp"
#include "gdrop/training_set.hpp"
