"""
Base module: DataLogger, incl. ABC of DataSource and DataOutput
"""

from circumradiusfem.Base import DataSource, DataOutput
from abc import ABC, abstractmethod
import time
import logging
# Load logging configuration from file
logger = logging.getLogger(__name__)


class DataLoggerBase(ABC):
    def __init__(
            self,
            data_sources_mapping: dict[str, DataSource.DataSourceBase],
            data_outputs_mapping: dict[str, DataOutput.DataOutputBase],
    ):
        """
        Initialize data logger instance

        The format of data_sources_mapping is as follows:
        {
            '<source1_name>': instance1 of DataSource,
            '<source2_name>': instance2 of DataSource,
            ...
        }

        The format of data_outputs_mapping is as follows:
        {
            '<output1_name>': instance1 of class DataOutput,
            '<output2_name>': instance2 of class DataOutput,
            ...
        }

        :param data_sources_mapping: Mapping of multiple data sources
        :param data_outputs_mapping: Mapping of multiple data outputs
        """
        if not data_sources_mapping:
            raise ValueError("At least one data source is required")
        self._data_sources_mapping = dict(data_sources_mapping)
        self._data_outputs_mapping = dict(data_outputs_mapping)

        # All variable names from all data sources in source order, duplicates kept once
        all_variable_names = []
        for ds in self._data_sources_mapping.values():
            for var in ds.all_variable_names:
                if var not in all_variable_names:
                    all_variable_names.append(var)
        self._all_variable_names = tuple(all_variable_names)

        # Set all_variable_names for each DataOutput and write header lines
        for do in self._data_outputs_mapping.values():
            do.all_variable_names = self._all_variable_names
            do.write_header_line()

    def log_data_all_outputs(self, data: dict):
        """Log one row to all data outputs"""
        for do_name, do in self._data_outputs_mapping.items():
            logger.debug(f"Logging data: {data} to {do_name}")
            do.log_data(data)

    @abstractmethod
    def run_data_logging(self, **kwargs):
        """Run data logging"""
        pass

    @property
    def data_sources_mapping(self) -> dict:
        return self._data_sources_mapping

    @property
    def data_outputs_mapping(self) -> dict:
        return self._data_outputs_mapping

    @property
    def all_variable_names(self) -> tuple[str, ...]:
        return self._all_variable_names


class DataLoggerSweep(DataLoggerBase):
    def __init__(
            self,
            data_sources_mapping: dict[str, DataSource.DataSourceBase],
            data_outputs_mapping: dict[str, DataOutput.DataOutputBase],
    ):
        """Data logger draining every source once, in mapping order"""
        logger.info("Initializing DataLoggerSweep ...")
        super().__init__(data_sources_mapping, data_outputs_mapping)

    def run_data_logging(self) -> list[dict]:
        """
        Run data logging
        :return: All logged rows, in the order they were written
        """
        start_time = time.time()
        logged_rows = []
        for ds_name, ds in self._data_sources_mapping.items():
            logger.info(f"Reading data source '{ds_name}' ...")
            for row in ds.read_data():
                self.log_data_all_outputs(row)
                logged_rows.append(row)
        logger.info(f"Data logging completed: {len(logged_rows)} row(s) in {time.time() - start_time:.2f} s")
        return logged_rows
