from sqlalchemy import Column, Integer, String, DateTime, func, Boolean, ForeignKey, Text
from sqlalchemy.orm import declarative_base, relationship

Base = declarative_base()


class Run(Base):
    __tablename__ = "runs"
    id = Column(Integer, primary_key=True, index=True)
    command = Column(String(50), nullable=False)
    group = Column(String(100), nullable=False)
    # bounds and discriminants exceed 64 bits, so they are kept as decimal text
    max_disc = Column(String(100), nullable=False)
    field_count = Column(Integer, default=0, nullable=False)
    manifest = Column(Text, nullable=False)
    created_at = Column(DateTime, default=func.now())
    fields = relationship("Field", back_populates="run", cascade="all, delete-orphan", order_by="Field.position")


class Field(Base):
    __tablename__ = "fields"
    id = Column(Integer, primary_key=True)
    run_id = Column(Integer, ForeignKey("runs.id", ondelete="CASCADE"), nullable=False, index=True)
    position = Column(Integer, nullable=False)
    disc = Column(String(100), nullable=False)
    conductor = Column(String(100), nullable=False)
    hnp = Column(Boolean, nullable=False)
    payload = Column(Text, nullable=False)
    run = relationship("Run", back_populates="fields")
