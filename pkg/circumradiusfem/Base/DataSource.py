"""
Module Data source

Data source module must always provide data in type 'dict', with keys of variable names. In this package a data
source is an experiment: every dict it yields is one result row.
"""

from abc import ABC, abstractmethod
from typing import Callable, Iterator
from circumradiusfem.Base import Auxiliary
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)


class DataSourceBase(ABC):
    """Base class of data source"""
    def __init__(self):
        # Internal variable for property 'all_variable_names'
        # It should be defined during the initialization of the child class. Using tuple to ensure the elements are
        # immutable.
        self._all_variable_names: tuple[str, ...] = ()

    @abstractmethod
    def read_data(self) -> Iterator[dict]:
        """
        Read data from source

        This method must be implemented in child classes and will be used by the DataLogger to retrieve all rows.
        """
        pass

    @property
    def all_variable_names(self) -> tuple[str, ...]:
        """
        All possible variable names provided by this data source

        This property returns a tuple containing the names of all variables that this data source can potentially
        provide.
        """
        return self._all_variable_names


class ParameterSweepDataSource(DataSourceBase):
    def __init__(
            self,
            all_variable_names: tuple[str, ...] | list[str],
            parameters: list[dict],
            row_function: Callable[[dict], dict | list[dict]],
            max_workers: int | None = None,
    ):
        """
        Data source evaluating one row function on a grid of parameter points
        :param all_variable_names: Names of all columns the row function provides
        :param parameters: Parameter points, each one passed as dict to the row function
        :param row_function: Function mapping one parameter point to one row (or a list of rows)
        :param max_workers: Number of worker threads, if None, use Auxiliary.worker_count()
        """
        super().__init__()
        if len(all_variable_names) == 0:
            raise ValueError("all_variable_names must not be empty")
        self._all_variable_names = tuple(all_variable_names)
        self.parameters = list(parameters)
        self.row_function = row_function
        self.max_workers = max_workers

    def _evaluate(self, point: dict) -> list[dict]:
        logger.info(f"Evaluating parameter point {point} ...")
        rows = self.row_function(point)
        return rows if isinstance(rows, list) else [rows]

    def read_data(self) -> Iterator[dict]:
        """Evaluate all parameter points, rows are yielded in parameter order"""
        for rows in Auxiliary.parallel_map(self._evaluate, self.parameters, self.max_workers):
            for row in rows:
                unknown = [k for k in row.keys() if k not in self._all_variable_names]
                if unknown:
                    raise ValueError(f"Row contains unknown variable names: '{unknown}'")
                yield row
