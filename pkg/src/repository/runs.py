from typing import Iterable

from sqlalchemy.orm import Session

from src.database.models import Field, Run
from src.schemas import FieldRecordModel, RunManifest


def create_run(manifest: RunManifest, max_disc: int, db: Session) -> Run:
    """
    The create_run function stores a new enumeration run with its manifest.

    :param manifest: RunManifest: The manifest of the run being archived
    :param max_disc: int: The discriminant bound of the run
    :param db: Session: Pass in the database session to the function
    :return: The run object that was created
    """
    run = Run(command=manifest.command, group=manifest.group or '', max_disc=str(max_disc),
              manifest=manifest.model_dump_json())
    db.add(run)
    db.commit()
    db.refresh(run)
    return run


def add_fields(run: Run, records: Iterable[FieldRecordModel], db: Session) -> int:
    """
    The add_fields function appends JSONL records to a run, keeping their order.

    :param run: Run: The run the records belong to
    :param records: Iterable[FieldRecordModel]: Records in stream order
    :param db: Session: Pass in the database session to the function
    :return: The number of records stored
    """
    count = 0
    for position, record in enumerate(records, start=run.field_count):
        db.add(Field(run_id=run.id, position=position, disc=str(record.disc), conductor=str(record.conductor),
                     hnp=record.hnp, payload=record.model_dump_json()))
        count += 1
    run.field_count += count
    db.commit()
    return count


def list_runs(limit: int, offset: int, db: Session) -> list[Run]:
    """
    The list_runs function returns archived runs, newest first.

    :param limit: int: Limit the number of runs returned
    :param offset: int: Specify how many runs to skip
    :param db: Session: Pass in the database session to the function
    :return: A list of runs
    """
    return db.query(Run).order_by(Run.id.desc()).limit(limit).offset(offset).all()


def get_run(run_id: int, db: Session) -> Run | None:
    return db.query(Run).filter_by(id=run_id).first()


def get_fields(run_id: int, db: Session) -> list[Field]:
    """
    The get_fields function returns the stored records of a run in stream order.

    :param run_id: int: Identify the run
    :param db: Session: Pass in the database session to the function
    :return: A list of fields, possibly empty
    """
    return db.query(Field).filter_by(run_id=run_id).order_by(Field.position).all()
