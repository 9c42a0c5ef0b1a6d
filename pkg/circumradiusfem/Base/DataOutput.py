"""
Module Data Output

Data output module will always receive data in type 'dict' from data logger, with keys of variable names.
"""

from abc import ABC, abstractmethod
from typing import TextIO, TypedDict
from circumradiusfem.Base import Auxiliary
import csv
import os
import sys
import logging.config
# Load logging configuration from file
logger = logging.getLogger(__name__)


class DataOutputBase(ABC):
    def __init__(self):
        # Internal variable for property 'all_variable_names'
        # It should be set by a DataLogger instance via property setter
        self._all_variable_names: tuple[str, ...] = ()

    @abstractmethod
    def log_data(self, data: dict):
        """
        Log data to output

        This method must be implemented in child class and will be used by the DataLogger to log data to the output
        """
        pass

    def write_header_line(self):
        """Write the header, called by the DataLogger on initialization; outputs without header do nothing"""
        pass

    @staticmethod
    def generate_dir_of_file(file_name: str):
        """Generate a directory to save file if it does not exist"""
        dir_path = os.path.dirname(file_name)
        if dir_path and not os.path.exists(dir_path):
            os.makedirs(dir_path)

    @property
    def all_variable_names(self) -> tuple[str, ...]:
        """
        All possible variable names of this data output

        This property returns a tuple containing the names of all variables that this data output can potentially
        contain.
        """
        return self._all_variable_names

    @all_variable_names.setter
    def all_variable_names(self, names: tuple[str, ...]):
        self._all_variable_names = names


class DataOutputCsv(DataOutputBase):
    class CsvWriterSettings(TypedDict):
        """Typed dict for csv writer settings"""
        delimiter: str
        lineterminator: str

    def __init__(
            self,
            file_name: str | None,
            csv_writer_settings: dict | None = None,
            stream: TextIO | None = None,
    ):
        """
        Initialize data output instance for csv data
        :param file_name: File name to save csv data with full path, if None, rows are written to the stream
        :param csv_writer_settings: Settings of csv writer, supported keys: 'delimiter', 'lineterminator', if None,
            use default settings
        :param stream: Text stream used when file_name is None, if None, use sys.stdout
        """
        logger.info("Initializing DataOutputCsv ...")

        super().__init__()
        self.file_name = file_name
        self.stream = stream
        if self.file_name is not None:
            self.generate_dir_of_file(self.file_name)  # Generate file path if not exists

        # Set default csv_writer_settings
        self.csv_writer_settings: 'DataOutputCsv.CsvWriterSettings' = {
            'delimiter': ',',  # Delimiter of csv-file
            'lineterminator': '\n',  # Fixed line ending, output must be identical across platforms
        }

        # Set csv_writer_settings
        if csv_writer_settings is None:
            # Use default csv_writer_settings
            logger.debug(f"Using default csv writer settings: {self.csv_writer_settings}")
        else:
            # Check all keys in csv_writer_settings
            for key in csv_writer_settings.keys():
                if key not in self.csv_writer_settings.keys():
                    raise ValueError(f"Invalid key in csv_writer_settings: '{key}'")
            # Update csv_writer_settings
            self.csv_writer_settings.update(csv_writer_settings)
            logger.info(f"Using csv writer settings: {self.csv_writer_settings}")

    def log_data(self, data: dict):
        """Log data to csv"""
        # Create a data row based on the order of all variable names
        row = [Auxiliary.format_value(data.get(k, None)) for k in self._all_variable_names]
        self._append_to_csv(row)  # Append data to csv

    def write_header_line(self):
        """Write header line as the first row of csv, this method must be called by initializing DataLogger"""
        self._write_to_csv(list(self._all_variable_names))

    def _write_to_csv(self, row: list):
        """Write a csv, the existing content in the file is erased as soon as the file is opened"""
        if self.file_name is None:
            self._write_to_stream(row)
            return
        try:
            with open(self.file_name, 'w', newline='') as f:
                csv_writer = csv.writer(f, **self.csv_writer_settings)
                csv_writer.writerow(row)
        except OSError as e:
            raise OSError(f"Unable to write csv file '{self.file_name}': {e}") from e

    def _append_to_csv(self, row: list):
        """Append a new line to csv, the existing content in the file is preserved"""
        if self.file_name is None:
            self._write_to_stream(row)
            return
        try:
            with open(self.file_name, 'a', newline='') as f:
                csv_writer = csv.writer(f, **self.csv_writer_settings)
                csv_writer.writerow(row)
        except OSError as e:
            raise OSError(f"Unable to append to csv file '{self.file_name}': {e}") from e

    def _write_to_stream(self, row: list):
        stream = sys.stdout if self.stream is None else self.stream
        csv.writer(stream, **self.csv_writer_settings).writerow(row)


class DataOutputMemory(DataOutputBase):
    """Keeps all logged rows in a list, used by the verification suite and the tests"""
    def __init__(self):
        super().__init__()
        self.rows: list[dict] = []

    def log_data(self, data: dict):
        self.rows.append({k: data.get(k, None) for k in self._all_variable_names})
