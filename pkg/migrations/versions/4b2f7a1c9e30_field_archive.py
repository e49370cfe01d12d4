"""Field archive

Revision ID: 4b2f7a1c9e30
Revises: 
Create Date: 2026-10-17 10:12:40.118204

"""
from alembic import op
import sqlalchemy as sa


# revision identifiers, used by Alembic.
revision = '4b2f7a1c9e30'
down_revision = None
branch_labels = None
depends_on = None


def upgrade() -> None:
    op.create_table('runs',
    sa.Column('id', sa.Integer(), nullable=False),
    sa.Column('command', sa.String(length=50), nullable=False),
    sa.Column('group', sa.String(length=100), nullable=False),
    sa.Column('max_disc', sa.String(length=100), nullable=False),
    sa.Column('field_count', sa.Integer(), nullable=False),
    sa.Column('manifest', sa.Text(), nullable=False),
    sa.Column('created_at', sa.DateTime(), nullable=True),
    sa.PrimaryKeyConstraint('id')
    )
    op.create_index(op.f('ix_runs_id'), 'runs', ['id'], unique=False)
    op.create_table('fields',
    sa.Column('id', sa.Integer(), nullable=False),
    sa.Column('run_id', sa.Integer(), nullable=False),
    sa.Column('position', sa.Integer(), nullable=False),
    sa.Column('disc', sa.String(length=100), nullable=False),
    sa.Column('conductor', sa.String(length=100), nullable=False),
    sa.Column('hnp', sa.Boolean(), nullable=False),
    sa.Column('payload', sa.Text(), nullable=False),
    sa.ForeignKeyConstraint(['run_id'], ['runs.id'], ondelete='CASCADE'),
    sa.PrimaryKeyConstraint('id')
    )
    op.create_index(op.f('ix_fields_run_id'), 'fields', ['run_id'], unique=False)


def downgrade() -> None:
    op.drop_index(op.f('ix_fields_run_id'), table_name='fields')
    op.drop_table('fields')
    op.drop_index(op.f('ix_runs_id'), table_name='runs')
    op.drop_table('runs')
